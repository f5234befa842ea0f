#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "catsim/state.hpp"

namespace catsim {

// Photon-number-resolving detection grouped into three classes that
// partition the counts: {0}, {2,4,...}, {1,3,...}. A zero count at the
// wrong detector changes the protocol case, so ZERO is kept separate
// from the even counts.
enum class outcome_class { zero, even_nonzero, odd };

using detection_pattern = std::vector<outcome_class>;

inline const char* to_string(outcome_class c) {
    switch (c) {
        case outcome_class::zero: return "ZERO";
        case outcome_class::even_nonzero: return "EVEN";
        case outcome_class::odd: return "ODD";
    }
    return "?";
}

// <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!), via log-gamma so large
// n cannot overflow.
inline cplx fock_amplitude(int n, cplx alpha) {
    if (n < 0) throw precondition_error("fock_amplitude: negative count");
    const double a = std::abs(alpha);
    if (a == 0.0) return n == 0 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    const double ln_mag = -0.5 * a * a + n * std::log(a) - 0.5 * std::lgamma(n + 1.0);
    return std::polar(std::exp(ln_mag), n * std::arg(alpha));
}

// Exact-count projection <n| at one mode; the mode is removed and the
// result is left unnormalized, so its squared norm is the joint
// probability of the count and the surviving branch.
inline state_vector project_photon_number(const state_vector& s, int mode, int n) {
    if (mode < 0 || mode >= s.mode_count())
        throw wiring_error("project_photon_number: mode out of range");
    state_vector out(s.mode_count() - 1);
    for (const auto& t : s.terms()) {
        std::vector<cplx> labels;
        labels.reserve(t.labels.size() - 1);
        for (int m = 0; m < s.mode_count(); ++m)
            if (m != mode) labels.push_back(t.labels[m]);
        out.push_term(t.coeff * fock_amplitude(n, t.labels[mode]), std::move(labels));
    }
    return out;
}

namespace detail {

inline void check_measured_modes(const state_vector& s, std::span<const int> modes) {
    for (size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] < 0 || modes[i] >= s.mode_count())
            throw wiring_error("measurement: mode out of range");
        for (size_t j = i + 1; j < modes.size(); ++j)
            if (modes[i] == modes[j]) throw wiring_error("measurement: duplicate mode");
    }
}

}  // namespace detail

// Per-mode Gram matrices of a fixed normalized state, so that many
// class probabilities can be evaluated against it without recomputing
// coherent overlaps. The three cached elements per term pair are
//   direct  = <b|d>
//   flipped = <b|-d>         (parity operator insertion)
//   vacuum  = <b|0><0|d>
// from which every class operator element follows:
//   ZERO = vacuum,  EVEN_NONZERO = (direct+flipped)/2 - vacuum,
//   ODD  = (direct-flipped)/2.
class gram_cache {
public:
    explicit gram_cache(const state_vector& s) : state_(s), n_(s.terms().size()) {
        const double n2 = norm_squared(s);
        if (std::abs(n2 - 1.0) > 1e-8)
            throw precondition_error("gram_cache: state not normalized");
        const int mc = s.mode_count();
        direct_.resize(mc);
        flipped_.resize(mc);
        vacuum_.resize(mc);
        for (int m = 0; m < mc; ++m) {
            direct_[m].resize(n_ * n_);
            flipped_[m].resize(n_ * n_);
            vacuum_[m].resize(n_ * n_);
            for (size_t i = 0; i < n_; ++i) {
                const cplx b = s.terms()[i].labels[m];
                const double b2 = std::norm(b);
                for (size_t j = 0; j < n_; ++j) {
                    const cplx d = s.terms()[j].labels[m];
                    direct_[m][i * n_ + j] = coherent_overlap(b, d);
                    flipped_[m][i * n_ + j] = coherent_overlap(b, -d);
                    vacuum_[m][i * n_ + j] = std::exp(-(b2 + std::norm(d)) / 2.0);
                }
            }
        }
    }

    const state_vector& state() const { return state_; }

    double class_probability(const detection_pattern& pattern,
                             std::span<const int> measured_modes) const {
        if (pattern.size() != measured_modes.size())
            throw dimension_error("class_probability: pattern/mode count mismatch");
        detail::check_measured_modes(state_, measured_modes);

        std::vector<int> which(state_.mode_count(), -1);
        for (size_t k = 0; k < measured_modes.size(); ++k)
            which[measured_modes[k]] = static_cast<int>(k);

        const auto& terms = state_.terms();
        cplx acc{0.0, 0.0};
        for (size_t i = 0; i < n_; ++i) {
            for (size_t j = 0; j < n_; ++j) {
                cplx v = std::conj(terms[i].coeff) * terms[j].coeff;
                for (int m = 0; m < state_.mode_count(); ++m) {
                    const size_t idx = i * n_ + j;
                    if (which[m] < 0) {
                        v *= direct_[m][idx];
                        continue;
                    }
                    switch (pattern[which[m]]) {
                        case outcome_class::zero:
                            v *= vacuum_[m][idx];
                            break;
                        case outcome_class::even_nonzero:
                            v *= (direct_[m][idx] + flipped_[m][idx]) / 2.0 - vacuum_[m][idx];
                            break;
                        case outcome_class::odd:
                            v *= (direct_[m][idx] - flipped_[m][idx]) / 2.0;
                            break;
                    }
                }
                acc += v;
            }
        }
        const double p = acc.real();
        return p > 0.0 ? p : 0.0;
    }

private:
    state_vector state_;
    size_t n_;
    std::vector<std::vector<cplx>> direct_, flipped_, vacuum_;
};

// Exact class probability, no truncation.
inline double class_probability(const state_vector& s, const detection_pattern& pattern,
                                std::span<const int> measured_modes) {
    return gram_cache(s).class_probability(pattern, measured_modes);
}

namespace detail {

// Measured-mode labels must lie in {+g, -g, 0} for one common g;
// returns |g| (0 if every label vanishes).
inline double grid_magnitude(const state_vector& s, int mode) {
    double g = 0.0;
    cplx ref{0.0, 0.0};
    for (const auto& t : s.terms()) {
        const double a = std::abs(t.labels[mode]);
        if (a > g) {
            g = a;
            ref = t.labels[mode];
        }
    }
    const double tol = 1e-8 * std::max(1.0, g);
    for (const auto& t : s.terms()) {
        const cplx l = t.labels[mode];
        if (std::abs(l) > tol && std::abs(l - ref) > tol && std::abs(l + ref) > tol)
            throw heterogeneous_class_error("herald: measured mode off the {+g,-g,0} grid");
    }
    return g;
}

// In-class count nearest the Poisson peak |g|^2, so the projection norm
// stays far from the singular threshold at large amplitudes. Under the
// grid precondition every in-class count heralds the same state.
inline int representative_count(outcome_class c, double grid_mag) {
    if (c == outcome_class::zero) return 0;
    const int peak = static_cast<int>(std::llround(grid_mag * grid_mag));
    if (c == outcome_class::odd) return std::max(peak | 1, 1);
    int n = peak - (peak % 2);
    return std::max(n, 2);
}

}  // namespace detail

// The normalized conditional state of a detection class, without its
// probability. Requires the grid precondition; count-independence
// within the class is re-verified against a second representative count.
inline state_vector herald_state(const state_vector& s, const detection_pattern& pattern,
                                 std::span<const int> measured_modes) {
    if (pattern.size() != measured_modes.size())
        throw dimension_error("herald_state: pattern/mode count mismatch");
    detail::check_measured_modes(s, measured_modes);

    std::vector<double> grid(measured_modes.size());
    for (size_t k = 0; k < measured_modes.size(); ++k)
        grid[k] = detail::grid_magnitude(s, measured_modes[k]);

    std::vector<size_t> order(measured_modes.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return measured_modes[x] > measured_modes[y]; });

    auto project_all = [&](bool second) {
        state_vector cur = s;
        for (size_t k : order) {
            int n = detail::representative_count(pattern[k], grid[k]);
            if (second && pattern[k] != outcome_class::zero) n += 2;
            cur = project_photon_number(cur, measured_modes[k], n);
        }
        return normalize(canonicalize(cur));
    };

    const state_vector first = project_all(false);
    const state_vector check = project_all(true);
    if (std::abs(fidelity(first, check) - 1.0) > 1e-10)
        throw heterogeneous_class_error("herald: conditional state depends on the count");
    return first;
}

struct herald_result {
    state_vector state;  // normalized conditional state on the surviving modes
    double probability;  // class probability
};

inline herald_result herald_class(const state_vector& s, const detection_pattern& pattern,
                                  std::span<const int> measured_modes) {
    const double p = class_probability(s, pattern, measured_modes);
    if (p <= 1e-20)
        throw degenerate_state_error("herald_class: class probability vanishes");
    return {herald_state(s, pattern, measured_modes), p};
}

}  // namespace catsim
