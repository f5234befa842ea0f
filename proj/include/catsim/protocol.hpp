#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catsim/gates.hpp"
#include "catsim/measure.hpp"

// End-to-end asymmetric bidirectional teleportation over entangled
// coherent states. Alice's two-mode superposition travels to Bob's
// output modes 4,5 while Bob's single-mode cat travels to Alice's
// output mode 6, heralded by photon counting on modes 7-12.
namespace catsim::abqt {

// Internal slot layout of the nine-mode global state.
//
//   slot   0   1   2   3    4    5    6    7    8
//   before A   A'  B   ch1  ch2  ch3  ch4  ch5  ch6
//   after  d7  d9  d11 d8   d10  d12  out4 out5 out6
//
// "after" is the layout once BPS-1 mixes (A, ch1) into detectors (7, 8),
// BPS-2 mixes (A', ch2) into (9, 10) and BPS-3 mixes (B, ch3) into
// (11, 12). Channel pairs are (1,4), (2,5), (3,6); Bob keeps outputs
// 4, 5 and Alice keeps output 6.
struct modes {
    static constexpr int alice_a = 0;
    static constexpr int alice_a_prime = 1;
    static constexpr int bob_b = 2;
    static constexpr int channel(int k) { return 2 + k; }  // k = 1..6
    static constexpr int detector(int k) {                 // k = 7..12
        return (k % 2 == 1) ? (k - 7) / 2 : 3 + (k - 8) / 2;
    }
    static constexpr int output(int k) { return 2 + k; }   // k = 4..6

    // Detector slots in pattern order (7, 8, 9, 10, 11, 12).
    static constexpr std::array<int, 6> measured{0, 3, 1, 4, 2, 5};
};

struct alice_info {
    // Amplitudes of the label patterns (+,+), (+,-), (-,+), (-,-).
    std::array<cplx, 4> a;

    explicit alice_info(std::array<cplx, 4> amps) : a(amps) {
        double s = 0.0;
        for (cplx v : a) s += std::norm(v);
        if (s <= 0.0) throw precondition_error("alice_info: all amplitudes zero");
    }

    static alice_info from_angles(double theta, double phi) {
        return alice_info({cplx{std::cos(theta), 0.0}, cplx{std::sin(theta), 0.0},
                           cplx{std::cos(phi), 0.0}, cplx{std::sin(phi), 0.0}});
    }
};

struct bob_info {
    // Amplitudes of the labels +, -.
    std::array<cplx, 2> b;

    explicit bob_info(std::array<cplx, 2> amps) : b(amps) {
        if (std::norm(b[0]) + std::norm(b[1]) <= 0.0)
            throw precondition_error("bob_info: both amplitudes zero");
    }

    static bob_info from_angle(double theta1) {
        return bob_info({cplx{std::cos(theta1), 0.0}, cplx{std::sin(theta1), 0.0}});
    }
};

enum class bell_variant { plus, shifted };

struct channel_spec {
    double alpha;
    // One variant per channel pair (1,4), (2,5), (3,6). The all-shifted
    // default is the unique combination under which the fully-even
    // detection pattern heralds Alice's amplitudes onto modes 4,5 and
    // Bob's onto mode 6 with no sign flips (pinned by a bootstrap test).
    std::array<bell_variant, 3> variants;

    explicit channel_spec(double a,
                          std::array<bell_variant, 3> v = {bell_variant::shifted,
                                                           bell_variant::shifted,
                                                           bell_variant::shifted})
        : alpha(a), variants(v) {
        if (!(a > 0.0)) throw precondition_error("channel_spec: alpha must be positive");
    }
};

enum class case_id : int {
    ambiguous = 0,
    i = 1, ii = 2, iii = 3, iv = 4, v = 5, vi = 6, vii = 7, viii = 8
};

inline const char* to_string(case_id c) {
    static constexpr const char* names[] = {"AMBIGUOUS", "I",  "II",  "III", "IV",
                                            "V",         "VI", "VII", "VIII"};
    return names[static_cast<int>(c)];
}

// ---------------------------------------------------------------------------
// State preparation

inline state_vector alice_state(const alice_info& info, double alpha) {
    state_vector s(2);
    const cplx p{alpha, 0.0}, m{-alpha, 0.0};
    s.push_term(info.a[0], {p, p});
    s.push_term(info.a[1], {p, m});
    s.push_term(info.a[2], {m, p});
    s.push_term(info.a[3], {m, m});
    return normalize(canonicalize(s));
}

inline state_vector bob_state(const bob_info& info, double alpha) {
    state_vector s(1);
    s.push_term(info.b[0], {cplx{alpha, 0.0}});
    s.push_term(info.b[1], {cplx{-alpha, 0.0}});
    return normalize(canonicalize(s));
}

inline state_vector build_bell(double alpha, bell_variant v) {
    state_vector s(2);
    const cplx p{alpha, 0.0}, m{-alpha, 0.0};
    if (v == bell_variant::plus) {
        s.push_term({1.0, 0.0}, {p, p});
        s.push_term({1.0, 0.0}, {m, m});
    } else {
        s.push_term({1.0, 0.0}, {p, m});
        s.push_term({1.0, 0.0}, {m, p});
    }
    return normalize(s);
}

// Six channel modes ordered 1..6; pair k lives on modes (k, k+3).
inline state_vector build_channel(const channel_spec& spec) {
    state_vector prod = tensor(
        tensor(build_bell(spec.alpha, spec.variants[0]), build_bell(spec.alpha, spec.variants[1])),
        build_bell(spec.alpha, spec.variants[2]));
    // Tensor order is (1,4,2,5,3,6); rearrange to (1,2,3,4,5,6).
    static constexpr std::array<int, 6> order{0, 2, 4, 1, 3, 5};
    return permute_modes(prod, order);
}

// The normalized nine-mode state after the three beam splitters.
inline state_vector assemble_and_mix(const alice_info& alice, const bob_info& bob,
                                     const channel_spec& spec) {
    state_vector global =
        tensor(tensor(alice_state(alice, spec.alpha), bob_state(bob, spec.alpha)),
               build_channel(spec));
    global = apply_bps(global, modes::alice_a, modes::channel(1));
    global = apply_bps(global, modes::alice_a_prime, modes::channel(2));
    global = apply_bps(global, modes::bob_b, modes::channel(3));

    // Every detector mode must sit on the {+sqrt2*alpha, -sqrt2*alpha, 0}
    // grid; class heralding is ill-defined otherwise.
    const double expect = std::numbers::sqrt2 * spec.alpha;
    for (int slot : modes::measured) {
        const double g = detail::grid_magnitude(global, slot);
        if (std::abs(g - expect) > 1e-9 * expect)
            throw heterogeneous_class_error("assemble_and_mix: detector grid mismatch");
    }
    return global;
}

// ---------------------------------------------------------------------------
// Detection classification

// Within each detector pair exactly one detector must stay dark. Which
// one it is, per pair, selects the case; anything else is ambiguous.
inline case_id classify_case(const detection_pattern& pattern) {
    if (pattern.size() != 6) throw dimension_error("classify_case: need six entries");
    int idx = 0;
    for (int p = 0; p < 3; ++p) {
        const outcome_class first = pattern[2 * p];
        const outcome_class second = pattern[2 * p + 1];
        const bool first_dark = first == outcome_class::zero && second != outcome_class::zero;
        const bool second_dark = second == outcome_class::zero && first != outcome_class::zero;
        if (!first_dark && !second_dark) return case_id::ambiguous;
        if (second_dark) idx |= 1 << p;
    }
    static constexpr std::array<case_id, 8> table{case_id::i,   case_id::v,  case_id::vii,
                                                  case_id::iii, case_id::viii, case_id::iv,
                                                  case_id::vi,  case_id::ii};
    return table[idx];
}

// Pairs whose second detector is dark; those output modes carry
// sign-flipped labels and need the pi phase correction.
inline std::array<bool, 3> case_flip(case_id c) {
    switch (c) {
        case case_id::i: return {false, false, false};
        case case_id::ii: return {true, true, true};
        case case_id::iii: return {true, true, false};
        case case_id::iv: return {true, false, true};
        case case_id::v: return {true, false, false};
        case case_id::vi: return {false, true, true};
        case case_id::vii: return {false, true, false};
        case case_id::viii: return {false, false, true};
        default: throw no_correction_error("case_flip: ambiguous pattern");
    }
}

// Table row order: (O,O,O), (O,O,E), (O,E,O), (E,O,O), (E,E,E), (E,E,O),
// (E,O,E), (O,E,E), where the parity refers to the bright detector of
// pairs 1..3.
inline int table_row(std::array<bool, 3> odd) {
    static constexpr std::array<int, 8> rows{5, 8, 7, 2, 6, 3, 4, 1};
    return rows[(odd[0] ? 1 : 0) | (odd[1] ? 2 : 0) | (odd[2] ? 4 : 0)];
}

inline std::array<bool, 3> row_parities(int row) {
    static constexpr std::array<std::array<bool, 3>, 9> par{{
        {},
        {true, true, true},   // row 1
        {true, true, false},  // row 2
        {true, false, true},  // row 3
        {false, true, true},  // row 4
        {false, false, false},// row 5
        {false, false, true}, // row 6
        {false, true, false}, // row 7
        {true, false, false}, // row 8
    }};
    if (row < 1 || row > 8) throw precondition_error("row_parities: row out of range");
    return par[row];
}

// The six-detector pattern of a (case, parity) table row.
inline detection_pattern row_pattern(case_id c, std::array<bool, 3> odd) {
    const auto flip = case_flip(c);
    detection_pattern pat(6);
    for (int p = 0; p < 3; ++p) {
        const outcome_class bright = odd[p] ? outcome_class::odd : outcome_class::even_nonzero;
        if (flip[p]) {  // second detector dark
            pat[2 * p] = bright;
            pat[2 * p + 1] = outcome_class::zero;
        } else {
            pat[2 * p] = outcome_class::zero;
            pat[2 * p + 1] = bright;
        }
    }
    return pat;
}

// ---------------------------------------------------------------------------
// Corrections

struct correction_plan {
    std::vector<gate_spec> alice_ops;  // tagged with protocol mode 6
    std::vector<gate_spec> bob_ops;    // tagged with protocol modes 4, 5

    bool alice_faithful() const { return !has_displacement(alice_ops); }
    bool bob_faithful() const { return !has_displacement(bob_ops); }

    static bool has_displacement(const std::vector<gate_spec>& ops) {
        for (const auto& g : ops)
            if (g.kind == gate_kind::displace) return true;
        return false;
    }
};

// One table row's prescription: pi phases on the case's flipped modes,
// then a displacement i*pi/(2 alpha) on every output mode whose pair
// saw an odd count.
inline correction_plan lookup_correction(case_id c, std::array<bool, 3> odd, double alpha) {
    if (c == case_id::ambiguous)
        throw no_correction_error("lookup_correction: no correction for ambiguous patterns");
    const auto flip = case_flip(c);
    const cplx disp{0.0, std::numbers::pi / (2.0 * alpha)};
    correction_plan plan;
    for (int p = 0; p < 2; ++p)
        if (flip[p]) plan.bob_ops.push_back(gate_spec::phase(4 + p, std::numbers::pi));
    for (int p = 0; p < 2; ++p)
        if (odd[p]) plan.bob_ops.push_back(gate_spec::displace(4 + p, disp));
    if (flip[2]) plan.alice_ops.push_back(gate_spec::phase(6, std::numbers::pi));
    if (odd[2]) plan.alice_ops.push_back(gate_spec::displace(6, disp));
    return plan;
}

namespace detail {

// Contract `drop_modes` of s with the coherent probe labels drawn from
// the state's own terms; the candidate giving the largest remainder is
// kept. Returns the unnormalized factor on the remaining modes.
inline state_vector best_contraction(const state_vector& s, std::span<const int> drop_modes) {
    std::vector<std::vector<cplx>> candidates;
    for (const auto& t : s.terms()) {
        std::vector<cplx> probe;
        for (int m : drop_modes) probe.push_back(t.labels[m]);
        bool seen = false;
        for (const auto& c : candidates) {
            bool same = true;
            for (size_t k = 0; k < probe.size(); ++k)
                if (std::abs(c[k] - probe[k]) > 1e-12) { same = false; break; }
            if (same) { seen = true; break; }
        }
        if (!seen) candidates.push_back(std::move(probe));
    }

    state_vector best;
    double best_norm = -1.0;
    std::vector<int> sorted(drop_modes.begin(), drop_modes.end());
    std::sort(sorted.rbegin(), sorted.rend());
    for (const auto& probe : candidates) {
        state_vector cur = s;
        for (int m : sorted) {
            size_t k = 0;
            for (size_t q = 0; q < drop_modes.size(); ++q)
                if (drop_modes[q] == m) k = q;
            cur = project_onto_coherent(cur, m, probe[k]);
        }
        cur = canonicalize(cur);
        const double n = norm(cur);
        if (n > best_norm) {
            best_norm = n;
            best = cur;
        }
    }
    return best;
}

}  // namespace detail

// Split the heralded three-mode state into its Bob (modes 4,5) and
// Alice (mode 6) factors, then run the plan's gates on each side.
// Returns (corrected_bob, corrected_alice), both normalized.
inline std::pair<state_vector, state_vector> apply_correction(const state_vector& heralded,
                                                              const correction_plan& plan) {
    if (heralded.mode_count() != 3)
        throw dimension_error("apply_correction: heralded state must have three modes");

    static constexpr std::array<int, 1> drop_back{2};
    static constexpr std::array<int, 2> drop_front{0, 1};
    state_vector bob_factor = normalize(detail::best_contraction(heralded, drop_back));
    state_vector alice_factor = normalize(detail::best_contraction(heralded, drop_front));

    if (std::abs(fidelity(tensor(bob_factor, alice_factor), heralded) - 1.0) > 1e-9)
        throw factorization_error("apply_correction: heralded state is not a (4,5)x(6) product");

    for (const auto& g : plan.bob_ops) {
        if (g.mode_a != 4 && g.mode_a != 5)
            throw wiring_error("apply_correction: bob op off modes 4/5");
        gate_spec local = g;
        local.mode_a = g.mode_a - 4;
        bob_factor = apply(bob_factor, local);
    }
    for (const auto& g : plan.alice_ops) {
        if (g.mode_a != 6) throw wiring_error("apply_correction: alice op off mode 6");
        gate_spec local = g;
        local.mode_a = 0;
        alice_factor = apply(alice_factor, local);
    }
    return {normalize(bob_factor), normalize(alice_factor)};
}

// Fidelities of the corrected outputs against the original information
// states: A->B on modes 4,5 and B->A on mode 6.
inline std::pair<double, double> outcome_fidelities(const state_vector& corrected_bob,
                                                    const state_vector& corrected_alice,
                                                    const alice_info& alice, const bob_info& bob,
                                                    double alpha) {
    return {fidelity(corrected_bob, alice_state(alice, alpha)),
            fidelity(corrected_alice, bob_state(bob, alpha))};
}

// ---------------------------------------------------------------------------
// Outcome enumeration

struct correction_outcome {
    correction_plan plan;
    state_vector corrected_bob;    // modes 4,5
    state_vector corrected_alice;  // mode 6
    double f_ab = 0.0;
    double f_ba = 0.0;
    bool faithful_ab = false;
    bool faithful_ba = false;
};

struct protocol_outcome {
    detection_pattern pattern;
    case_id kase = case_id::ambiguous;
    int row = 0;                        // 1..8 for table rows, 0 otherwise
    std::array<bool, 3> odd_parity{};   // bright-detector parities (rows only)
    double probability = 0.0;
    state_vector heralded;              // modes 4,5,6
    std::optional<correction_outcome> corrected;
};

namespace detail {

inline protocol_outcome make_row_outcome(const state_vector& mixed, const gram_cache& cache,
                                         case_id c, std::array<bool, 3> odd,
                                         const alice_info& alice, const bob_info& bob,
                                         double alpha) {
    protocol_outcome out;
    out.pattern = row_pattern(c, odd);
    out.kase = c;
    out.row = table_row(odd);
    out.odd_parity = odd;
    out.probability = cache.class_probability(out.pattern, modes::measured);
    out.heralded = herald_state(mixed, out.pattern, modes::measured);

    correction_outcome corr;
    corr.plan = lookup_correction(c, odd, alpha);
    std::tie(corr.corrected_bob, corr.corrected_alice) = apply_correction(out.heralded, corr.plan);
    std::tie(corr.f_ab, corr.f_ba) =
        outcome_fidelities(corr.corrected_bob, corr.corrected_alice, alice, bob, alpha);
    corr.faithful_ab = corr.plan.bob_faithful();
    corr.faithful_ba = corr.plan.alice_faithful();
    out.corrected = std::move(corr);
    return out;
}

}  // namespace detail

// The 64 table rows (8 cases x 8 parity rows), fully processed.
inline std::vector<protocol_outcome> enumerate_row_outcomes(const alice_info& alice,
                                                            const bob_info& bob,
                                                            const channel_spec& spec) {
    const state_vector mixed = assemble_and_mix(alice, bob, spec);
    const gram_cache cache(mixed);
    std::vector<protocol_outcome> out;
    out.reserve(64);
    for (int c = 1; c <= 8; ++c)
        for (int r = 1; r <= 8; ++r)
            out.push_back(detail::make_row_outcome(mixed, cache, static_cast<case_id>(c),
                                                   row_parities(r), alice, bob, spec.alpha));
    return out;
}

// Every detection class of the full 3^6 partition with probability above
// min_probability. Table rows carry corrections; ambiguous classes only
// their heralded state.
inline std::vector<protocol_outcome> enumerate_outcomes(const alice_info& alice,
                                                        const bob_info& bob,
                                                        const channel_spec& spec,
                                                        double min_probability = 1e-15) {
    const state_vector mixed = assemble_and_mix(alice, bob, spec);
    const gram_cache cache(mixed);
    std::vector<protocol_outcome> out;
    detection_pattern pat(6);
    for (int code = 0; code < 729; ++code) {
        int rem = code;
        for (int k = 0; k < 6; ++k) {
            pat[k] = static_cast<outcome_class>(rem % 3);
            rem /= 3;
        }
        const case_id c = classify_case(pat);
        if (c != case_id::ambiguous) {
            std::array<bool, 3> odd{};
            for (int p = 0; p < 3; ++p) {
                const outcome_class bright =
                    pat[2 * p] == outcome_class::zero ? pat[2 * p + 1] : pat[2 * p];
                odd[p] = bright == outcome_class::odd;
            }
            out.push_back(detail::make_row_outcome(mixed, cache, c, odd, alice, bob, spec.alpha));
            continue;
        }
        const double p = cache.class_probability(pat, modes::measured);
        if (p <= min_probability) continue;
        protocol_outcome o;
        o.pattern = pat;
        o.kase = case_id::ambiguous;
        o.probability = p;
        o.heralded = herald_state(mixed, pat, modes::measured);
        out.push_back(std::move(o));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregates

struct success_summary {
    double faithful_total = 0.0;               // the 8 all-even rows
    std::array<double, 8> faithful_per_case{}; // indexed by case - 1
    double row_total = 0.0;                    // all 64 table rows
    double ambiguous_mass = 0.0;               // everything else
};

inline success_summary total_success_probability(const alice_info& alice, const bob_info& bob,
                                                 const channel_spec& spec) {
    const state_vector mixed = assemble_and_mix(alice, bob, spec);
    const gram_cache cache(mixed);
    success_summary sum;
    detection_pattern pat(6);
    for (int code = 0; code < 729; ++code) {
        int rem = code;
        for (int k = 0; k < 6; ++k) {
            pat[k] = static_cast<outcome_class>(rem % 3);
            rem /= 3;
        }
        const double p = cache.class_probability(pat, modes::measured);
        const case_id c = classify_case(pat);
        if (c == case_id::ambiguous) {
            sum.ambiguous_mass += p;
            continue;
        }
        sum.row_total += p;
        bool all_even = true;
        for (int q = 0; q < 3; ++q) {
            const outcome_class bright =
                pat[2 * q] == outcome_class::zero ? pat[2 * q + 1] : pat[2 * q];
            if (bright != outcome_class::even_nonzero) all_even = false;
        }
        if (all_even) {
            sum.faithful_total += p;
            sum.faithful_per_case[static_cast<int>(c) - 1] += p;
        }
    }
    return sum;
}

// Probability-weighted fidelity over the 64 table rows, per direction.
inline std::pair<double, double> average_fidelity(const alice_info& alice, const bob_info& bob,
                                                  const channel_spec& spec) {
    double ab = 0.0, ba = 0.0;
    for (const auto& o : enumerate_row_outcomes(alice, bob, spec)) {
        ab += o.probability * o.corrected->f_ab;
        ba += o.probability * o.corrected->f_ba;
    }
    return {ab, ba};
}

// ---------------------------------------------------------------------------
// Fidelity equality groups

struct equality_group {
    std::string name;
    double min_value = 0.0;
    double max_value = 0.0;
    double spread = 0.0;
    bool within_tol = false;
};

// Row fidelities that coincide by construction: the A->B value depends
// only on the pair-1/pair-2 parities and the B->A value only on the
// pair-3 parity, both case-independent. Groups exceeding 1e-9 spread
// are flagged. Extra degeneracies between groups (e.g. at theta == phi)
// are appended as informational entries.
inline std::vector<equality_group> fidelity_equality_report(const alice_info& alice,
                                                            const bob_info& bob,
                                                            const channel_spec& spec) {
    const auto rows = enumerate_row_outcomes(alice, bob, spec);
    auto value = [&](int c, int r, bool ab) {
        for (const auto& o : rows)
            if (static_cast<int>(o.kase) == c && o.row == r)
                return ab ? o.corrected->f_ab : o.corrected->f_ba;
        throw precondition_error("fidelity_equality_report: missing row");
    };

    struct group_spec {
        std::string name;
        std::vector<int> rows;
        bool ab;
    };
    const std::vector<group_spec> specs = {
        {"A->B rows {1,2} across cases", {1, 2}, true},
        {"A->B rows {3,8} across cases", {3, 8}, true},
        {"A->B rows {4,7} across cases", {4, 7}, true},
        {"A->B rows {5,6} across cases", {5, 6}, true},
        {"B->A rows {1,3,4,6} across cases", {1, 3, 4, 6}, false},
        {"B->A rows {2,5,7,8} across cases", {2, 5, 7, 8}, false},
    };

    std::vector<equality_group> report;
    for (const auto& g : specs) {
        equality_group eg;
        eg.name = g.name;
        eg.min_value = 2.0;
        eg.max_value = -1.0;
        for (int c = 1; c <= 8; ++c) {
            for (int r : g.rows) {
                const double v = value(c, r, g.ab);
                eg.min_value = std::min(eg.min_value, v);
                eg.max_value = std::max(eg.max_value, v);
            }
        }
        eg.spread = eg.max_value - eg.min_value;
        eg.within_tol = eg.spread < 1e-9;
        report.push_back(std::move(eg));
    }
    for (size_t i = 0; i < specs.size(); ++i) {
        for (size_t j = i + 1; j < specs.size(); ++j) {
            const double vi = report[i].min_value, vj = report[j].min_value;
            if (std::abs(vi - vj) < 1e-12) {
                equality_group eg;
                eg.name = "degenerate: [" + specs[i].name + "] == [" + specs[j].name + "]";
                eg.min_value = vi;
                eg.max_value = vj;
                eg.spread = std::abs(vi - vj);
                eg.within_tol = true;
                report.push_back(std::move(eg));
            }
        }
    }
    return report;
}

}  // namespace catsim::abqt
