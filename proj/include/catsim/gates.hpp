#pragma once

#include <cmath>
#include <numbers>

#include "catsim/state.hpp"

namespace catsim {

// The three ideal linear-optical gates. Coherent superpositions are
// closed under all of them, so each acts term-by-term on the labels in
// exact closed form; no number-basis expansion happens here.

enum class gate_kind { bps, phase, displace };

struct gate_spec {
    gate_kind kind;
    int mode_a = 0;
    int mode_b = 0;      // bps only
    double psi = 0.0;    // phase only, radians
    cplx beta{0.0, 0.0}; // displace only

    static gate_spec bps(int i, int j) { return {gate_kind::bps, i, j, 0.0, {}}; }
    static gate_spec phase(int m, double psi) { return {gate_kind::phase, m, 0, psi, {}}; }
    static gate_spec displace(int m, cplx beta) { return {gate_kind::displace, m, 0, 0.0, beta}; }
};

namespace detail {
inline void check_mode(const state_vector& s, int m, const char* who) {
    if (m < 0 || m >= s.mode_count()) throw wiring_error(std::string(who) + ": mode out of range");
}
}  // namespace detail

// Symmetric beam splitter with phase shifter:
// labels (b, g) at modes (i, j) become ((b+g)/sqrt2, (b-g)/sqrt2).
inline state_vector apply_bps(const state_vector& s, int i, int j) {
    detail::check_mode(s, i, "apply_bps");
    detail::check_mode(s, j, "apply_bps");
    if (i == j) throw wiring_error("apply_bps: duplicate mode");
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    std::vector<coherent_term> terms = s.terms();
    for (auto& t : terms) {
        const cplx b = t.labels[i];
        const cplx g = t.labels[j];
        t.labels[i] = (b + g) * inv_sqrt2;
        t.labels[j] = (b - g) * inv_sqrt2;
    }
    return state_vector(s.mode_count(), std::move(terms));
}

// P(psi): label at mode m picks up e^{i psi}. At psi = pi this is the
// label sign flip a -> -a.
inline state_vector apply_phase(const state_vector& s, int m, double psi) {
    detail::check_mode(s, m, "apply_phase");
    const cplx rot = std::polar(1.0, psi);
    std::vector<coherent_term> terms = s.terms();
    for (auto& t : terms) t.labels[m] *= rot;
    return state_vector(s.mode_count(), std::move(terms));
}

// D(beta)|d> = exp[(beta conj(d) - conj(beta) d)/2] |beta + d>.
inline state_vector apply_displacement(const state_vector& s, int m, cplx beta) {
    detail::check_mode(s, m, "apply_displacement");
    std::vector<coherent_term> terms = s.terms();
    for (auto& t : terms) {
        const cplx d = t.labels[m];
        t.coeff *= std::exp((beta * std::conj(d) - std::conj(beta) * d) / 2.0);
        t.labels[m] = beta + d;
    }
    return state_vector(s.mode_count(), std::move(terms));
}

inline state_vector apply(const state_vector& s, const gate_spec& g) {
    switch (g.kind) {
        case gate_kind::bps: return apply_bps(s, g.mode_a, g.mode_b);
        case gate_kind::phase: return apply_phase(s, g.mode_a, g.psi);
        case gate_kind::displace: return apply_displacement(s, g.mode_a, g.beta);
    }
    throw precondition_error("apply: unknown gate kind");
}

}  // namespace catsim
