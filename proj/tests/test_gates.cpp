#include <catch_amalgamated.hpp>

#include "catsim/gates.hpp"
#include "helpers.hpp"

using namespace catsim;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;

TEST_CASE("beam splitter label action") {
    const auto in = state_vector::coherent({cplx{1, 0}, cplx{1, 0}});
    const auto out = apply_bps(in, 0, 1);
    CHECK_THAT(std::abs(out.terms()[0].labels[0] - cplx{std::numbers::sqrt2, 0}),
               WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(out.terms()[0].labels[1]), WithinAbs(0.0, 1e-15));

    const auto anti = apply_bps(state_vector::coherent({cplx{1, 0}, cplx{-1, 0}}), 0, 1);
    CHECK_THAT(std::abs(anti.terms()[0].labels[0]), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(anti.terms()[0].labels[1] - cplx{std::numbers::sqrt2, 0}),
               WithinAbs(0.0, 1e-15));
}

TEST_CASE("beam splitter is an involution") {
    // (b, g) -> ((b+g)/s2, (b-g)/s2) applied twice returns (b, g); check
    // on random superpositions.
    auto g = test_util::make_rng(21);
    for (int i = 0; i < 100; ++i) {
        const auto s = test_util::random_normalized(g, 2, 3);
        const auto twice = apply_bps(apply_bps(s, 0, 1), 0, 1);
        CHECK_THAT(fidelity(s, twice), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("beam splitter wiring errors") {
    const auto s = state_vector::coherent({cplx{1, 0}, cplx{0, 0}});
    CHECK_THROWS_AS(apply_bps(s, 0, 0), wiring_error);
    CHECK_THROWS_AS(apply_bps(s, 0, 2), wiring_error);
}

TEST_CASE("phase shifter") {
    const auto s = state_vector::coherent({cplx{1, 0}});
    const auto flipped = apply_phase(s, 0, pi);
    CHECK_THAT(std::abs(flipped.terms()[0].labels[0] - cplx{-1, 0}), WithinAbs(0.0, 1e-15));

    const auto same = apply_phase(s, 0, 0.0);
    CHECK(same.terms()[0].labels[0] == cplx{1, 0});

    const auto quarter = apply_phase(s, 0, pi / 2.0);
    CHECK_THAT(std::abs(quarter.terms()[0].labels[0] - cplx{0, 1}), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(apply_phase(s, 1, pi), wiring_error);
}

TEST_CASE("phase composition") {
    auto g = test_util::make_rng(22);
    for (int i = 0; i < 100; ++i) {
        const auto s = test_util::random_normalized(g, 1, 3);
        const double p1 = test_util::uniform(g, -3, 3), p2 = test_util::uniform(g, -3, 3);
        const auto split = apply_phase(apply_phase(s, 0, p1), 0, p2);
        const auto joint = apply_phase(s, 0, p1 + p2);
        CHECK_THAT(fidelity(split, joint), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("displacement examples") {
    // D(b)|0> = |b> with no phase
    const auto vac = state_vector::coherent({cplx{0, 0}});
    const auto disp = apply_displacement(vac, 0, {0.3, 0.7});
    CHECK_THAT(std::abs(disp.terms()[0].coeff - cplx{1, 0}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(disp.terms()[0].labels[0] - cplx{0.3, 0.7}), WithinAbs(0.0, 1e-15));

    // D(i pi/2)|1>: the phase exponent is (b d* - b* d)/2 = i pi/2,
    // worked out by hand, so the coefficient becomes i.
    const auto one = state_vector::coherent({cplx{1, 0}});
    const auto kicked = apply_displacement(one, 0, {0.0, pi / 2.0});
    CHECK_THAT(std::abs(kicked.terms()[0].coeff - cplx{0, 1}), WithinAbs(0.0, 1e-14));
    CHECK_THAT(std::abs(kicked.terms()[0].labels[0] - cplx{1.0, pi / 2.0}), WithinAbs(0.0, 1e-14));

    CHECK_THROWS_AS(apply_displacement(one, 3, {0, 0}), wiring_error);
}

TEST_CASE("displacement inverse and composition") {
    auto g = test_util::make_rng(23);
    for (int i = 0; i < 100; ++i) {
        const auto s = test_util::random_normalized(g, 1, 3);
        const cplx b1 = test_util::random_label(g), b2 = test_util::random_label(g);
        const auto back = apply_displacement(apply_displacement(s, 0, b1), 0, -b1);
        CHECK_THAT(fidelity(back, s), WithinAbs(1.0, 1e-12));

        const auto split = apply_displacement(apply_displacement(s, 0, b2), 0, b1);
        const auto joint = apply_displacement(s, 0, b1 + b2);
        CHECK_THAT(fidelity(split, joint), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("gates preserve norms and overlap magnitudes") {
    auto g = test_util::make_rng(24);
    for (int i = 0; i < 60; ++i) {
        const auto a = test_util::random_normalized(g, 2, 3);
        const auto b = test_util::random_normalized(g, 2, 3);
        const double want = std::abs(inner_product(a, b));

        for (int which = 0; which < 3; ++which) {
            gate_spec spec;
            if (which == 0) spec = gate_spec::bps(0, 1);
            if (which == 1) spec = gate_spec::phase(0, test_util::uniform(g, -3, 3));
            if (which == 2) spec = gate_spec::displace(1, test_util::random_label(g));
            const auto ga = apply(a, spec);
            const auto gb = apply(b, spec);
            CHECK_THAT(norm(ga), WithinAbs(1.0, 1e-12));
            CHECK_THAT(std::abs(inner_product(ga, gb)), WithinAbs(want, 1e-12));
        }
    }
}

TEST_CASE("beam splitter is linear") {
    auto g = test_util::make_rng(25);
    for (int i = 0; i < 60; ++i) {
        const auto a = test_util::random_state(g, 2, 2);
        const auto b = test_util::random_state(g, 2, 2);
        const auto lhs = apply_bps(add(a, b), 0, 1);
        const auto rhs = add(apply_bps(a, 0, 1), apply_bps(b, 0, 1));
        CHECK_THAT(std::abs(inner_product(lhs, lhs) - inner_product(lhs, rhs)),
                   WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::abs(inner_product(rhs, rhs) - inner_product(lhs, rhs)),
                   WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("two-mode entangler preparation") {
    // Mixing (|a s2> + |-a s2>) with vacuum yields |a,a> + |-a,-a>.
    const double alpha = 0.9;
    state_vector in(2);
    in.push_term({1.0, 0.0}, {cplx{alpha * std::numbers::sqrt2, 0}, cplx{0, 0}});
    in.push_term({1.0, 0.0}, {cplx{-alpha * std::numbers::sqrt2, 0}, cplx{0, 0}});

    state_vector want(2);
    want.push_term({1.0, 0.0}, {cplx{alpha, 0}, cplx{alpha, 0}});
    want.push_term({1.0, 0.0}, {cplx{-alpha, 0}, cplx{-alpha, 0}});

    CHECK_THAT(fidelity(apply_bps(in, 0, 1), want), WithinAbs(1.0, 1e-12));
}
