#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "catsim/measure.hpp"
#include "catsim/protocol.hpp"

// Brute-force verifier in a truncated photon-number basis. States are
// dense amplitude tensors; the gates are rebuilt from first principles
// (binomial beam-splitter expansion, Laguerre displacement matrix
// elements) so that nothing here shares an evolution path with the
// closed-form coherent engine. The engine is only consulted at the very
// end, to compare final probabilities and states.
namespace catsim::fock {

inline int default_cutoff(double alpha) {
    return 8 * static_cast<int>(std::ceil(alpha * alpha)) + 16;
}

// <n|alpha> for n = 0..cutoff by the upward recurrence
// f_{n+1} = f_n * alpha / sqrt(n+1); deliberately a different numeric
// path from the engine's log-gamma form.
inline std::vector<cplx> coherent_column(cplx alpha, int cutoff) {
    std::vector<cplx> f(cutoff + 1);
    f[0] = std::exp(cplx{-std::norm(alpha) / 2.0, 0.0});
    for (int n = 0; n < cutoff; ++n) f[n + 1] = f[n] * alpha / std::sqrt(n + 1.0);
    return f;
}

class fock_tensor {
public:
    fock_tensor(int mode_count, int cutoff)
        : mode_count_(mode_count), cutoff_(cutoff), amps_(pow_dim(mode_count, cutoff)) {
        if (mode_count < 1) throw dimension_error("fock_tensor: need at least one mode");
        if (cutoff < 1) throw precondition_error("fock_tensor: cutoff must be >= 1");
    }

    int mode_count() const { return mode_count_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return cutoff_ + 1; }
    std::vector<cplx>& amps() { return amps_; }
    const std::vector<cplx>& amps() const { return amps_; }

    size_t index(std::span<const int> counts) const {
        size_t idx = 0;
        for (int m = 0; m < mode_count_; ++m) idx = idx * dim() + counts[m];
        return idx;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const cplx& a : amps_) s += std::norm(a);
        return s;
    }

    // Probability mass sitting at the top bin of one mode.
    double tail_mass(int mode) const {
        double s = 0.0;
        const size_t n = amps_.size();
        for (size_t idx = 0; idx < n; ++idx)
            if (digit(idx, mode) == cutoff_) s += std::norm(amps_[idx]);
        return s;
    }

    int digit(size_t idx, int mode) const {
        for (int m = mode_count_ - 1; m > mode; --m) idx /= dim();
        return static_cast<int>(idx % dim());
    }

private:
    static size_t pow_dim(int modes, int cutoff) {
        size_t d = 1;
        for (int m = 0; m < modes; ++m) d *= static_cast<size_t>(cutoff + 1);
        return d;
    }

    int mode_count_;
    int cutoff_;
    std::vector<cplx> amps_;
};

inline cplx inner(const fock_tensor& a, const fock_tensor& b) {
    if (a.mode_count() != b.mode_count() || a.cutoff() != b.cutoff())
        throw dimension_error("fock inner: shape mismatch");
    cplx s{0.0, 0.0};
    for (size_t i = 0; i < a.amps().size(); ++i) s += std::conj(a.amps()[i]) * b.amps()[i];
    return s;
}

inline double fidelity(const fock_tensor& a, const fock_tensor& b) {
    const double na = a.norm_squared(), nb = b.norm_squared();
    if (na <= 0.0 || nb <= 0.0) throw degenerate_state_error("fock fidelity: zero tensor");
    return std::norm(inner(a, b)) / (na * nb);
}

// Expand a coherent superposition into the number basis. Fails if any
// label parks more than eps of its mass at the truncation edge.
inline fock_tensor encode(const state_vector& s, int cutoff, double eps = 1e-10) {
    fock_tensor out(s.mode_count(), cutoff);
    std::vector<std::vector<cplx>> cols(s.mode_count());
    for (const auto& t : s.terms()) {
        for (int m = 0; m < s.mode_count(); ++m) {
            cols[m] = coherent_column(t.labels[m], cutoff);
            if (std::norm(cols[m][cutoff]) > eps) {
                const double a = std::abs(t.labels[m]);
                throw cutoff_error("encode: tail mass above eps", default_cutoff(a / std::numbers::sqrt2));
            }
        }
        const size_t n = out.amps().size();
        for (size_t idx = 0; idx < n; ++idx) {
            cplx v = t.coeff;
            size_t rem = idx;
            for (int m = s.mode_count() - 1; m >= 0; --m) {
                v *= cols[m][rem % out.dim()];
                rem /= out.dim();
            }
            out.amps()[idx] += v;
        }
    }
    return out;
}

// Two-mode beam-splitter unitary in the number basis, from the operator
// substitution a+ -> (c+ + d+)/sqrt2, b+ -> (c+ - d+)/sqrt2 expanded
// binomially. Stored dense as U[(a,b),(m,n)]; photon number conserving.
inline std::vector<double> bps_unitary(int cutoff) {
    const int d = cutoff + 1;
    std::vector<double> lg(2 * cutoff + 2);
    for (size_t i = 0; i < lg.size(); ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
    std::vector<double> u(static_cast<size_t>(d) * d * d * d, 0.0);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            for (int a = 0; a < d; ++a) {
                const int b = m + n - a;
                if (b < 0 || b > cutoff) continue;
                double sum = 0.0;
                const int j_lo = std::max(0, a - n), j_hi = std::min(m, a);
                for (int j = j_lo; j <= j_hi; ++j) {
                    const int k = a - j;
                    const double ln_mag = -(m + n) * 0.5 * std::numbers::ln2 +
                                          0.5 * (lg[a] + lg[b] - lg[m] - lg[n]) +
                                          (lg[m] - lg[j] - lg[m - j]) +
                                          (lg[n] - lg[k] - lg[n - k]);
                    const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
                    sum += sign * std::exp(ln_mag);
                }
                u[((static_cast<size_t>(a) * d + b) * d + m) * d + n] = sum;
            }
        }
    }
    return u;
}

// Displacement matrix elements <m|D(beta)|n> via associated Laguerre
// polynomials.
inline std::vector<cplx> displacement_matrix(cplx beta, int cutoff) {
    const int d = cutoff + 1;
    const double x = std::norm(beta);
    std::vector<double> lg(d + 1);
    for (int i = 0; i <= d; ++i) lg[i] = std::lgamma(i + 1.0);

    // laguerre[k][q] = L_q^{(k)}(x)
    std::vector<std::vector<double>> lag(d, std::vector<double>(d));
    for (int k = 0; k < d; ++k) {
        lag[k][0] = 1.0;
        if (d > 1) lag[k][1] = 1.0 + k - x;
        for (int q = 1; q + 1 < d; ++q)
            lag[k][q + 1] = ((2 * q + 1 + k - x) * lag[k][q] - (q + k) * lag[k][q - 1]) / (q + 1.0);
    }

    std::vector<cplx> mat(static_cast<size_t>(d) * d);
    const double pref = std::exp(-x / 2.0);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            const int k = std::abs(m - n);
            const int q = std::min(m, n);
            const double scale = std::exp(0.5 * (lg[q] - lg[std::max(m, n)]));
            const cplx pw = (m >= n) ? std::pow(beta, k) : std::pow(-std::conj(beta), k);
            mat[static_cast<size_t>(m) * d + n] = pref * scale * pw * lag[k][q];
        }
    }
    return mat;
}

namespace detail {

template <typename Fn>
inline void for_each_pair_slice(fock_tensor& t, int i, int j, Fn&& fn) {
    // Visit the tensor as slices over modes (i, j) with all other mode
    // indices fixed; fn receives a (dim x dim) gather/scatter accessor.
    const int d = t.dim();
    const int mc = t.mode_count();
    std::vector<size_t> strides(mc);
    size_t s = 1;
    for (int m = mc - 1; m >= 0; --m) {
        strides[m] = s;
        s *= d;
    }
    std::vector<int> other;
    for (int m = 0; m < mc; ++m)
        if (m != i && m != j) other.push_back(m);
    size_t outer = 1;
    for (size_t k = 0; k < other.size(); ++k) outer *= d;
    for (size_t o = 0; o < outer; ++o) {
        size_t base = 0;
        size_t rem = o;
        for (size_t k = 0; k < other.size(); ++k) {
            base += (rem % d) * strides[other[k]];
            rem /= d;
        }
        fn(base, strides[i], strides[j]);
    }
}

}  // namespace detail

inline fock_tensor apply_bps_fock(const fock_tensor& t, int i, int j) {
    if (i < 0 || j < 0 || i >= t.mode_count() || j >= t.mode_count() || i == j)
        throw wiring_error("apply_bps_fock: bad mode pair");
    const int d = t.dim();
    const std::vector<double> u = bps_unitary(t.cutoff());
    fock_tensor out = t;
    std::fill(out.amps().begin(), out.amps().end(), cplx{0.0, 0.0});
    fock_tensor in = t;
    detail::for_each_pair_slice(in, i, j, [&](size_t base, size_t si, size_t sj) {
        for (int m = 0; m < d; ++m) {
            for (int n = 0; n < d; ++n) {
                const cplx amp = in.amps()[base + m * si + n * sj];
                if (amp == cplx{0.0, 0.0}) continue;
                for (int a = 0; a < d; ++a) {
                    const int b = m + n - a;
                    if (b < 0 || b >= d) continue;
                    const double w = u[((static_cast<size_t>(a) * d + b) * d + m) * d + n];
                    if (w != 0.0) out.amps()[base + a * si + b * sj] += w * amp;
                }
            }
        }
    });
    return out;
}

inline fock_tensor apply_phase_fock(const fock_tensor& t, int mode, double psi) {
    if (mode < 0 || mode >= t.mode_count()) throw wiring_error("apply_phase_fock: mode out of range");
    fock_tensor out = t;
    const size_t n = out.amps().size();
    for (size_t idx = 0; idx < n; ++idx)
        out.amps()[idx] *= std::polar(1.0, out.digit(idx, mode) * psi);
    return out;
}

inline fock_tensor apply_displacement_fock(const fock_tensor& t, int mode, cplx beta) {
    if (mode < 0 || mode >= t.mode_count())
        throw wiring_error("apply_displacement_fock: mode out of range");
    const int d = t.dim();
    const std::vector<cplx> mat = displacement_matrix(beta, t.cutoff());
    fock_tensor out = t;
    std::fill(out.amps().begin(), out.amps().end(), cplx{0.0, 0.0});
    // Reuse the pair-slice walker with a dummy second mode if available;
    // otherwise do the single-mode contraction directly.
    const int mc = t.mode_count();
    std::vector<size_t> strides(mc);
    size_t s = 1;
    for (int m = mc - 1; m >= 0; --m) {
        strides[m] = s;
        s *= d;
    }
    const size_t total = t.amps().size();
    for (size_t idx = 0; idx < total; ++idx) {
        const cplx amp = t.amps()[idx];
        if (amp == cplx{0.0, 0.0}) continue;
        const int n = t.digit(idx, mode);
        const size_t base = idx - n * strides[mode];
        for (int m = 0; m < d; ++m)
            out.amps()[base + m * strides[mode]] += mat[static_cast<size_t>(m) * d + n] * amp;
    }
    return out;
}

inline bool count_in_class(int n, outcome_class c) {
    switch (c) {
        case outcome_class::zero: return n == 0;
        case outcome_class::even_nonzero: return n >= 2 && n % 2 == 0;
        case outcome_class::odd: return n % 2 == 1;
    }
    return false;
}

// Brute-force class probability: explicit sum over all truncated counts.
inline double pattern_probability(const fock_tensor& t, const detection_pattern& pattern,
                                  std::span<const int> measured_modes) {
    if (pattern.size() != measured_modes.size())
        throw dimension_error("pattern_probability: pattern/mode count mismatch");
    double p = 0.0;
    const size_t n = t.amps().size();
    for (size_t idx = 0; idx < n; ++idx) {
        bool ok = true;
        for (size_t k = 0; k < measured_modes.size() && ok; ++k)
            ok = count_in_class(t.digit(idx, measured_modes[k]), pattern[k]);
        if (ok) p += std::norm(t.amps()[idx]);
    }
    return p;
}

// Exact-count heralding by index slicing; measured modes are removed.
inline fock_tensor herald_fock(const fock_tensor& t, std::span<const int> counts,
                               std::span<const int> measured_modes) {
    if (counts.size() != measured_modes.size())
        throw dimension_error("herald_fock: counts/mode count mismatch");
    const int kept = t.mode_count() - static_cast<int>(measured_modes.size());
    if (kept < 1) throw dimension_error("herald_fock: nothing left to keep");
    fock_tensor out(kept, t.cutoff());
    const size_t n = t.amps().size();
    std::vector<int> digits(t.mode_count());
    for (size_t idx = 0; idx < n; ++idx) {
        bool match = true;
        for (size_t k = 0; k < measured_modes.size() && match; ++k)
            match = t.digit(idx, measured_modes[k]) == counts[k];
        if (!match) continue;
        for (int m = 0; m < t.mode_count(); ++m) digits[m] = t.digit(idx, m);
        size_t oidx = 0;
        for (int m = 0; m < t.mode_count(); ++m) {
            bool is_measured = false;
            for (int mm : measured_modes)
                if (mm == m) is_measured = true;
            if (!is_measured) oidx = oidx * out.dim() + digits[m];
        }
        out.amps()[oidx] = t.amps()[idx];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole-protocol oracle.
//
// A dense nine-mode tensor at useful cutoffs does not fit in memory, but
// every pre-mix protocol state is a sum of 64 coherent product terms and
// each beam splitter touches one (information, channel) pair. Applying
// the number-basis BPS to a term therefore yields a two-mode amplitude
// matrix per pair, and the post-mix state is held exactly (up to
// truncation) as sum_t c_t (M_t^1 x M_t^2 x M_t^3 x f_t4 x f_t5 x f_t6).
// Probabilities and heralded states then follow from per-pair
// contractions of those matrices; the arithmetic is identical to the
// dense tensor's, with none of its memory.
class protocol_oracle {
public:
    protocol_oracle(const abqt::alice_info& alice, const abqt::bob_info& bob,
                    const abqt::channel_spec& spec, int cutoff, double eps = 1e-10)
        : n_(cutoff), d_(cutoff + 1), alpha_(spec.alpha) {
        build_terms(alice, bob, spec, eps);
        build_tables();
        normalize_coeffs();
    }

    double alpha() const { return alpha_; }
    int cutoff() const { return n_; }

    // Joint class probability over the six detectors (pattern in the
    // order 7, 8, 9, 10, 11, 12).
    double pattern_probability(const detection_pattern& pattern) const {
        if (pattern.size() != 6) throw dimension_error("oracle: need a six-detector pattern");
        const size_t t_count = coeff_.size();
        cplx acc{0.0, 0.0};
        for (size_t t = 0; t < t_count; ++t) {
            for (size_t u = 0; u < t_count; ++u) {
                cplx v = std::conj(coeff_[t]) * coeff_[u];
                for (int p = 0; p < 3; ++p) {
                    const int ca = static_cast<int>(pattern[2 * p]);
                    const int cb = static_cast<int>(pattern[2 * p + 1]);
                    v *= pair_class_[p][ca * 3 + cb][t * t_count + u];
                }
                for (int o = 0; o < 3; ++o) v *= out_overlap_[o][t * t_count + u];
                acc += v;
            }
        }
        return std::max(acc.real(), 0.0);
    }

    // Marginal class probability of a single detector pair.
    double pair_marginal(int pair, outcome_class first, outcome_class second) const {
        const size_t t_count = coeff_.size();
        cplx acc{0.0, 0.0};
        for (size_t t = 0; t < t_count; ++t) {
            for (size_t u = 0; u < t_count; ++u) {
                cplx v = std::conj(coeff_[t]) * coeff_[u];
                for (int p = 0; p < 3; ++p) {
                    if (p == pair)
                        v *= pair_class_[p][static_cast<int>(first) * 3 +
                                            static_cast<int>(second)][t * t_count + u];
                    else
                        v *= pair_all_[p][t * t_count + u];
                }
                for (int o = 0; o < 3; ++o) v *= out_overlap_[o][t * t_count + u];
                acc += v;
            }
        }
        return std::max(acc.real(), 0.0);
    }

    double partition_total() const {
        double total = 0.0;
        detection_pattern pat(6);
        for (int code = 0; code < 729; ++code) {
            int rem = code;
            for (int k = 0; k < 6; ++k) {
                pat[k] = static_cast<outcome_class>(rem % 3);
                rem /= 3;
            }
            total += pattern_probability(pat);
        }
        return total;
    }

    // Normalized three-mode heralded tensor (outputs 4, 5, 6) at the
    // representative in-class counts of the pattern.
    fock_tensor herald(const detection_pattern& pattern) const {
        if (pattern.size() != 6) throw dimension_error("oracle: need a six-detector pattern");
        const double grid = std::numbers::sqrt2 * alpha_;
        std::array<int, 6> counts{};
        for (int k = 0; k < 6; ++k) counts[k] = catsim::detail::representative_count(pattern[k], grid);

        const size_t t_count = coeff_.size();
        fock_tensor out(3, n_);
        for (size_t t = 0; t < t_count; ++t) {
            cplx w = coeff_[t];
            for (int p = 0; p < 3; ++p)
                w *= pair_mats_[t][p][static_cast<size_t>(counts[2 * p]) * d_ + counts[2 * p + 1]];
            if (w == cplx{0.0, 0.0}) continue;
            for (int n4 = 0; n4 < d_; ++n4) {
                const cplx w4 = w * out_vecs_[t][0][n4];
                for (int n5 = 0; n5 < d_; ++n5) {
                    const cplx w45 = w4 * out_vecs_[t][1][n5];
                    cplx* dst = &out.amps()[(static_cast<size_t>(n4) * d_ + n5) * d_];
                    const cplx* src = out_vecs_[t][2].data();
                    for (int n6 = 0; n6 < d_; ++n6) dst[n6] += w45 * src[n6];
                }
            }
        }
        const double nrm = std::sqrt(out.norm_squared());
        if (nrm <= 1e-150) throw degenerate_state_error("oracle herald: empty branch");
        for (cplx& a : out.amps()) a /= nrm;
        return out;
    }

private:
    void build_terms(const abqt::alice_info& alice, const abqt::bob_info& bob,
                     const abqt::channel_spec& spec, double eps) {
        const double a = spec.alpha;
        const std::vector<double> u = bps_unitary(n_);

        std::array<std::array<int, 2>, 4> asign{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
        for (int ia = 0; ia < 4; ++ia) {
            for (int ib = 0; ib < 2; ++ib) {
                for (int ch = 0; ch < 8; ++ch) {
                    const int s1 = asign[ia][0], s2 = asign[ia][1], s3 = ib == 0 ? 1 : -1;
                    const int c1 = (ch & 1) ? -1 : 1;
                    const int c2 = (ch & 2) ? -1 : 1;
                    const int c3 = (ch & 4) ? -1 : 1;
                    auto partner = [&](int c, int p) {
                        return spec.variants[p] == abqt::bell_variant::plus ? c : -c;
                    };
                    const int c4 = partner(c1, 0), c5 = partner(c2, 1), c6 = partner(c3, 2);

                    coeff_.push_back(alice.a[ia] * bob.b[ib]);
                    pair_mats_.push_back({mix_pair(s1 * a, c1 * a, u, eps),
                                          mix_pair(s2 * a, c2 * a, u, eps),
                                          mix_pair(s3 * a, c3 * a, u, eps)});
                    out_vecs_.push_back({tail_checked(coherent_column(cplx(c4 * a, 0.0), n_), eps),
                                         tail_checked(coherent_column(cplx(c5 * a, 0.0), n_), eps),
                                         tail_checked(coherent_column(cplx(c6 * a, 0.0), n_), eps)});
                }
            }
        }
    }

    std::vector<cplx> tail_checked(std::vector<cplx> col, double eps) const {
        if (std::norm(col[n_]) > eps)
            throw cutoff_error("oracle: encode tail mass above eps", default_cutoff(alpha_));
        return col;
    }

    // Number-basis beam splitter applied to the coherent product
    // |info> x |channel>; returns the two-mode amplitude matrix.
    std::vector<cplx> mix_pair(double info_label, double chan_label,
                               const std::vector<double>& u, double eps) const {
        const std::vector<cplx> f = tail_checked(coherent_column(cplx(info_label, 0.0), n_), eps);
        const std::vector<cplx> g = tail_checked(coherent_column(cplx(chan_label, 0.0), n_), eps);
        std::vector<cplx> mat(static_cast<size_t>(d_) * d_, cplx{0.0, 0.0});
        double in_norm = 0.0;
        for (int m = 0; m < d_; ++m) {
            for (int n = 0; n < d_; ++n) {
                const cplx amp = f[m] * g[n];
                in_norm += std::norm(amp);
                for (int aa = 0; aa < d_; ++aa) {
                    const int bb = m + n - aa;
                    if (bb < 0 || bb >= d_) continue;
                    const double w = u[((static_cast<size_t>(aa) * d_ + bb) * d_ + m) * d_ + n];
                    if (w != 0.0) mat[static_cast<size_t>(aa) * d_ + bb] += w * amp;
                }
            }
        }
        double out_norm = 0.0;
        for (const cplx& v : mat) out_norm += std::norm(v);
        if (in_norm - out_norm > 100.0 * eps)
            throw cutoff_error("oracle: beam splitter pushed mass past the cutoff",
                               default_cutoff(alpha_) + 8);
        return mat;
    }

    void build_tables() {
        const size_t t_count = coeff_.size();
        for (int p = 0; p < 3; ++p) {
            for (int c = 0; c < 9; ++c) pair_class_[p][c].assign(t_count * t_count, {0.0, 0.0});
            pair_all_[p].assign(t_count * t_count, {0.0, 0.0});
        }
        for (int o = 0; o < 3; ++o) out_overlap_[o].assign(t_count * t_count, {0.0, 0.0});

        auto class_of = [](int n) {
            if (n == 0) return 0;  // matches outcome_class::zero
            if (n % 2 == 0) return 1;
            return 2;
        };
        // enum order is {zero, even_nonzero, odd}
        auto cls_index = [&](int n) {
            const int c = class_of(n);
            return c == 0 ? static_cast<int>(outcome_class::zero)
                          : (c == 1 ? static_cast<int>(outcome_class::even_nonzero)
                                    : static_cast<int>(outcome_class::odd));
        };

        for (size_t t = 0; t < t_count; ++t) {
            for (size_t w = 0; w < t_count; ++w) {
                for (int p = 0; p < 3; ++p) {
                    const auto& mt = pair_mats_[t][p];
                    const auto& mw = pair_mats_[w][p];
                    std::array<cplx, 9> sums{};
                    for (int aa = 0; aa < d_; ++aa)
                        for (int bb = 0; bb < d_; ++bb)
                            sums[cls_index(aa) * 3 + cls_index(bb)] +=
                                std::conj(mt[static_cast<size_t>(aa) * d_ + bb]) *
                                mw[static_cast<size_t>(aa) * d_ + bb];
                    cplx all{0.0, 0.0};
                    for (int c = 0; c < 9; ++c) {
                        pair_class_[p][c][t * t_count + w] = sums[c];
                        all += sums[c];
                    }
                    pair_all_[p][t * t_count + w] = all;
                }
                for (int o = 0; o < 3; ++o) {
                    cplx s{0.0, 0.0};
                    for (int nn = 0; nn < d_; ++nn)
                        s += std::conj(out_vecs_[t][o][nn]) * out_vecs_[w][o][nn];
                    out_overlap_[o][t * t_count + w] = s;
                }
            }
        }
    }

    void normalize_coeffs() {
        const size_t t_count = coeff_.size();
        cplx n2{0.0, 0.0};
        for (size_t t = 0; t < t_count; ++t) {
            for (size_t w = 0; w < t_count; ++w) {
                cplx v = std::conj(coeff_[t]) * coeff_[w];
                for (int p = 0; p < 3; ++p) v *= pair_all_[p][t * t_count + w];
                for (int o = 0; o < 3; ++o) v *= out_overlap_[o][t * t_count + w];
                n2 += v;
            }
        }
        const double nrm = std::sqrt(std::max(n2.real(), 0.0));
        if (nrm <= 0.0) throw degenerate_state_error("oracle: zero norm");
        for (cplx& c : coeff_) c /= nrm;
    }

    int n_;
    int d_;
    double alpha_;
    std::vector<cplx> coeff_;
    std::vector<std::array<std::vector<cplx>, 3>> pair_mats_;
    std::vector<std::array<std::vector<cplx>, 3>> out_vecs_;
    std::array<std::array<std::vector<cplx>, 9>, 3> pair_class_;
    std::array<std::vector<cplx>, 3> pair_all_;
    std::array<std::vector<cplx>, 3> out_overlap_;
};

// ---------------------------------------------------------------------------
// Cross-engine verification

struct verify_report {
    double gate_deviation = 0.0;            // 1 - fidelity, closed form vs Fock gates
    double pair_marginal_deviation = 0.0;   // 3 pairs x 9 class combinations
    double row_probability_deviation = 0.0; // 64 table rows
    double heralded_state_deviation = 0.0;  // 1 - fidelity, 64 heralded states
    double partition_deficit = 0.0;         // |1 - total class mass| in the oracle
    double tolerance = 1e-8;

    double worst() const {
        return std::max({gate_deviation, pair_marginal_deviation, row_probability_deviation,
                         heralded_state_deviation, partition_deficit});
    }
    bool pass() const { return worst() <= tolerance; }
};

namespace detail {

inline double gate_agreement(double alpha, int cutoff, double eps) {
    using std::numbers::pi;
    double worst = 0.0;
    auto check = [&](const fock_tensor& got, const state_vector& want) {
        worst = std::max(worst, std::abs(1.0 - fock::fidelity(got, encode(want, cutoff, eps))));
    };

    // cat state through each gate
    state_vector cat(1);
    cat.push_term({1.0, 0.0}, {cplx{alpha, 0.0}});
    cat.push_term({0.6, 0.2}, {cplx{-alpha, 0.0}});
    cat = normalize(cat);

    check(apply_phase_fock(encode(cat, cutoff, eps), 0, pi / 3.0), apply_phase(cat, 0, pi / 3.0));
    const cplx disp{0.0, pi / (2.0 * alpha)};
    check(apply_displacement_fock(encode(cat, cutoff, eps), 0, disp),
          apply_displacement(cat, 0, disp));

    state_vector two(2);
    two.push_term({0.8, 0.0}, {cplx{alpha, 0.0}, cplx{-alpha, 0.0}});
    two.push_term({0.1, 0.4}, {cplx{-alpha, 0.0}, cplx{alpha, 0.0}});
    two = normalize(two);
    check(apply_bps_fock(encode(two, cutoff, eps), 0, 1), apply_bps(two, 0, 1));
    return worst;
}

}  // namespace detail

// Full cross-check between the coherent engine and the Fock oracle at
// one parameter point.
inline verify_report cross_check(const abqt::alice_info& alice, const abqt::bob_info& bob,
                                 const abqt::channel_spec& spec, int cutoff, double eps = 1e-10) {
    verify_report rep;
    rep.gate_deviation = detail::gate_agreement(spec.alpha, cutoff, eps);

    const protocol_oracle oracle(alice, bob, spec, cutoff, eps);
    const state_vector mixed = abqt::assemble_and_mix(alice, bob, spec);
    const gram_cache cache(mixed);

    for (int p = 0; p < 3; ++p) {
        const std::array<int, 2> pair_slots{abqt::modes::measured[2 * p],
                                            abqt::modes::measured[2 * p + 1]};
        for (int ca = 0; ca < 3; ++ca) {
            for (int cb = 0; cb < 3; ++cb) {
                const detection_pattern pat{static_cast<outcome_class>(ca),
                                            static_cast<outcome_class>(cb)};
                const double eng = cache.class_probability(pat, pair_slots);
                const double orc = oracle.pair_marginal(p, pat[0], pat[1]);
                rep.pair_marginal_deviation =
                    std::max(rep.pair_marginal_deviation, std::abs(eng - orc));
            }
        }
    }

    for (int c = 1; c <= 8; ++c) {
        for (int r = 1; r <= 8; ++r) {
            const auto pat = abqt::row_pattern(static_cast<abqt::case_id>(c), abqt::row_parities(r));
            const double eng = cache.class_probability(pat, abqt::modes::measured);
            const double orc = oracle.pattern_probability(pat);
            rep.row_probability_deviation =
                std::max(rep.row_probability_deviation, std::abs(eng - orc));

            const state_vector eng_herald = herald_state(mixed, pat, abqt::modes::measured);
            const fock_tensor orc_herald = oracle.herald(pat);
            const double f = fock::fidelity(orc_herald, encode(eng_herald, cutoff, eps));
            rep.heralded_state_deviation =
                std::max(rep.heralded_state_deviation, std::abs(1.0 - f));
        }
    }

    rep.partition_deficit = std::abs(1.0 - oracle.partition_total());
    return rep;
}

}  // namespace catsim::fock
