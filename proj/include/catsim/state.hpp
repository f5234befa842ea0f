#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "catsim/errors.hpp"

namespace catsim {

using cplx = std::complex<double>;

// Label vectors closer than this (componentwise) are merged by canonicalize.
inline constexpr double label_merge_tol = 1e-9;
// Coefficients below coeff_drop_tol * max|coeff| are dropped by canonicalize.
// Relative, so states of tiny overall weight (unnormalized heralding
// branches) keep their structure.
inline constexpr double coeff_drop_tol = 1e-13;
// Below this norm a state counts as degenerate and cannot be normalized.
inline constexpr double singular_norm_tol = 1e-14;

namespace detail {
inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}
}  // namespace detail

// One summand of a coherent-state superposition: a complex coefficient
// times a product of coherent states, one label per mode.
struct coherent_term {
    cplx coeff;
    std::vector<cplx> labels;
};

// Finite superposition of multimode coherent states over a fixed mode
// count. Immutable value type: every operation returns a new state.
class state_vector {
public:
    state_vector() = default;

    explicit state_vector(int mode_count) : mode_count_(check_count(mode_count)) {}

    state_vector(int mode_count, std::vector<coherent_term> terms)
        : mode_count_(check_count(mode_count)), terms_(std::move(terms)) {
        for (const auto& t : terms_) validate_term(t);
    }

    // 0-mode state with coefficient 1: the identity of tensor().
    static state_vector scalar_one() {
        state_vector s(0);
        s.terms_.push_back({cplx{1.0, 0.0}, {}});
        return s;
    }

    // Single coherent product |labels[0], labels[1], ...> with unit coefficient.
    static state_vector coherent(std::vector<cplx> labels) {
        state_vector s(static_cast<int>(labels.size()));
        s.push_term(cplx{1.0, 0.0}, std::move(labels));
        return s;
    }

    int mode_count() const { return mode_count_; }
    const std::vector<coherent_term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void push_term(cplx coeff, std::vector<cplx> labels) {
        coherent_term t{coeff, std::move(labels)};
        validate_term(t);
        terms_.push_back(std::move(t));
    }

private:
    static int check_count(int n) {
        if (n < 0) throw dimension_error("state_vector: negative mode count");
        return n;
    }

    void validate_term(const coherent_term& t) const {
        if (static_cast<int>(t.labels.size()) != mode_count_)
            throw dimension_error("state_vector: term label count != mode count");
        if (!detail::is_finite(t.coeff))
            throw precondition_error("state_vector: non-finite coefficient");
        for (cplx l : t.labels)
            if (!detail::is_finite(l))
                throw precondition_error("state_vector: non-finite label");
    }

    int mode_count_ = 0;
    std::vector<coherent_term> terms_;
};

// <beta|delta> = exp[-(|beta|^2 + |delta|^2 - 2 conj(beta) delta) / 2].
inline cplx coherent_overlap(cplx beta, cplx delta) {
    const double b2 = std::norm(beta);
    const double d2 = std::norm(delta);
    return std::exp(cplx{-(b2 + d2) / 2.0, 0.0} + std::conj(beta) * delta);
}

// Gram sum over all term pairs.
inline cplx inner_product(const state_vector& bra, const state_vector& ket) {
    if (bra.mode_count() != ket.mode_count())
        throw dimension_error("inner_product: mode count mismatch");
    cplx acc{0.0, 0.0};
    for (const auto& s : bra.terms()) {
        for (const auto& t : ket.terms()) {
            cplx ov = std::conj(s.coeff) * t.coeff;
            for (int m = 0; m < bra.mode_count(); ++m)
                ov *= coherent_overlap(s.labels[m], t.labels[m]);
            acc += ov;
        }
    }
    return acc;
}

inline double norm_squared(const state_vector& s) {
    const double n2 = inner_product(s, s).real();
    return n2 > 0.0 ? n2 : 0.0;  // Gram noise can dip slightly below zero
}

inline double norm(const state_vector& s) { return std::sqrt(norm_squared(s)); }

inline state_vector normalize(const state_vector& s) {
    const double n = norm(s);
    if (n <= singular_norm_tol)
        throw degenerate_state_error("normalize: norm below singular tolerance");
    std::vector<coherent_term> terms = s.terms();
    for (auto& t : terms) t.coeff /= n;
    return state_vector(s.mode_count(), std::move(terms));
}

inline bool is_normalized(const state_vector& s, double tol = 1e-10) {
    return std::abs(norm_squared(s) - 1.0) <= tol;
}

inline state_vector tensor(const state_vector& a, const state_vector& b) {
    state_vector out(a.mode_count() + b.mode_count());
    for (const auto& s : a.terms()) {
        for (const auto& t : b.terms()) {
            std::vector<cplx> labels = s.labels;
            labels.insert(labels.end(), t.labels.begin(), t.labels.end());
            out.push_term(s.coeff * t.coeff, std::move(labels));
        }
    }
    return out;
}

inline state_vector add(const state_vector& a, const state_vector& b) {
    if (a.mode_count() != b.mode_count())
        throw dimension_error("add: mode count mismatch");
    std::vector<coherent_term> terms = a.terms();
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return state_vector(a.mode_count(), std::move(terms));
}

inline state_vector scale(cplx s, const state_vector& a) {
    std::vector<coherent_term> terms = a.terms();
    for (auto& t : terms) t.coeff *= s;
    return state_vector(a.mode_count(), std::move(terms));
}

// Merge terms whose label vectors agree componentwise within tol, then
// drop terms whose coefficient is negligible relative to the largest.
inline state_vector canonicalize(const state_vector& s, double tol = label_merge_tol) {
    std::vector<coherent_term> merged;
    for (const auto& t : s.terms()) {
        bool hit = false;
        for (auto& m : merged) {
            bool same = true;
            for (int k = 0; k < s.mode_count(); ++k) {
                if (std::abs(m.labels[k].real() - t.labels[k].real()) > tol ||
                    std::abs(m.labels[k].imag() - t.labels[k].imag()) > tol) {
                    same = false;
                    break;
                }
            }
            if (same) {
                m.coeff += t.coeff;
                hit = true;
                break;
            }
        }
        if (!hit) merged.push_back(t);
    }
    double max_abs = 0.0;
    for (const auto& t : merged) max_abs = std::max(max_abs, std::abs(t.coeff));
    std::vector<coherent_term> kept;
    for (auto& t : merged)
        if (std::abs(t.coeff) > coeff_drop_tol * max_abs) kept.push_back(std::move(t));
    return state_vector(s.mode_count(), std::move(kept));
}

// |<a_hat|b_hat>|^2 on the normalized states.
inline double fidelity(const state_vector& a, const state_vector& b) {
    const state_vector an = normalize(a);
    const state_vector bn = normalize(b);
    const double f = std::norm(inner_product(an, bn));
    return f;
}

// Contract one mode with the bra <probe|; the mode is removed.
// The result is unnormalized.
inline state_vector project_onto_coherent(const state_vector& s, int mode, cplx probe) {
    if (mode < 0 || mode >= s.mode_count())
        throw wiring_error("project_onto_coherent: mode out of range");
    state_vector out(s.mode_count() - 1);
    for (const auto& t : s.terms()) {
        std::vector<cplx> labels;
        labels.reserve(t.labels.size() - 1);
        for (int m = 0; m < s.mode_count(); ++m)
            if (m != mode) labels.push_back(t.labels[m]);
        out.push_term(t.coeff * coherent_overlap(probe, t.labels[mode]), std::move(labels));
    }
    return out;
}

// Reorder modes: new mode i carries what old mode order[i] carried.
inline state_vector permute_modes(const state_vector& s, std::span<const int> order) {
    if (static_cast<int>(order.size()) != s.mode_count())
        throw dimension_error("permute_modes: order size mismatch");
    state_vector out(s.mode_count());
    for (const auto& t : s.terms()) {
        std::vector<cplx> labels(t.labels.size());
        for (int m = 0; m < s.mode_count(); ++m) {
            int src = order[m];
            if (src < 0 || src >= s.mode_count())
                throw wiring_error("permute_modes: index out of range");
            labels[m] = t.labels[src];
        }
        out.push_term(t.coeff, std::move(labels));
    }
    return out;
}

}  // namespace catsim
