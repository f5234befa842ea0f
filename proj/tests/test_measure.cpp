#include <catch_amalgamated.hpp>

#include "catsim/measure.hpp"
#include "helpers.hpp"

using namespace catsim;
using Catch::Matchers::WithinAbs;

namespace {

// Two-mode state whose labels sit on the {+g, -g, 0} grid, the shape a
// detector mode has after protocol mixing.
state_vector grid_state(double g1, double g2) {
    state_vector s(2);
    s.push_term({0.6, 0.1}, {cplx{g1, 0}, cplx{0, 0}});
    s.push_term({0.3, -0.2}, {cplx{-g1, 0}, cplx{g2, 0}});
    s.push_term({0.4, 0.0}, {cplx{0, 0}, cplx{-g2, 0}});
    return normalize(s);
}

}  // namespace

TEST_CASE("fock amplitude values") {
    CHECK_THAT(std::abs(fock_amplitude(0, {1, 0}) - cplx{std::exp(-0.5), 0}),
               WithinAbs(0.0, 1e-15));
    // hand value: e^{-1/2} / sqrt(2!)
    CHECK_THAT(std::abs(fock_amplitude(2, {1, 0}) - cplx{std::exp(-0.5) / std::numbers::sqrt2, 0}),
               WithinAbs(0.0, 1e-15));
    CHECK(fock_amplitude(1, {0, 0}) == cplx{0, 0});
    CHECK_THROWS_AS(fock_amplitude(-1, {1, 0}), precondition_error);
}

TEST_CASE("fock amplitudes are square-summable to one") {
    const cplx a{1.1, -0.6};
    double total = 0.0;
    for (int n = 0; n <= 80; ++n) total += std::norm(fock_amplitude(n, a));
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
}

TEST_CASE("photon number projection") {
    const auto two = state_vector::coherent({cplx{0.8, 0.2}, cplx{-0.4, 0.0}});
    const auto proj = project_photon_number(two, 0, 0);
    REQUIRE(proj.mode_count() == 1);
    CHECK_THAT(std::abs(proj.terms()[0].coeff - fock_amplitude(0, {0.8, 0.2})),
               WithinAbs(0.0, 1e-15));
    CHECK(proj.terms()[0].labels[0] == cplx{-0.4, 0.0});

    // no photons in an empty mode
    const auto dark = project_photon_number(state_vector::coherent({cplx{0, 0}, cplx{1, 0}}), 0, 3);
    CHECK_THAT(norm(dark), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(project_photon_number(two, 5, 0), wiring_error);
}

TEST_CASE("projection parity selection on balanced superpositions") {
    // (-g)^n = (-1)^n g^n: odd counts kill |g> + |-g>, even counts kill
    // |g> - |-g>.
    auto rng = test_util::make_rng(31);
    for (int i = 0; i < 200; ++i) {
        const cplx g = test_util::random_label(rng, 1.6);
        if (std::abs(g) < 0.1) continue;
        state_vector plus(1), minus(1);
        plus.push_term({1, 0}, {g});
        plus.push_term({1, 0}, {-g});
        minus.push_term({1, 0}, {g});
        minus.push_term({-1, 0}, {-g});
        const int n = 1 + static_cast<int>(test_util::uniform(rng, 0, 6));
        const auto p = project_photon_number(plus, 0, n);
        const auto m = project_photon_number(minus, 0, n);
        if (n % 2 == 1)
            CHECK_THAT(std::abs(p.terms()[0].coeff + p.terms()[1].coeff), WithinAbs(0.0, 1e-15));
        else
            CHECK_THAT(std::abs(m.terms()[0].coeff + m.terms()[1].coeff), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("single-mode class probabilities") {
    const auto one = state_vector::coherent({cplx{1, 0}});
    static constexpr std::array<int, 1> m0{0};

    CHECK_THAT(class_probability(one, {outcome_class::zero}, m0),
               WithinAbs(std::exp(-1.0), 1e-14));

    const double even_or_zero = class_probability(one, {outcome_class::zero}, m0) +
                                class_probability(one, {outcome_class::even_nonzero}, m0);
    CHECK_THAT(even_or_zero, WithinAbs((1.0 + std::exp(-2.0)) / 2.0, 1e-14));

    CHECK_THROWS_AS(class_probability(scale({2.0, 0.0}, one), {outcome_class::zero}, m0),
                    precondition_error);
}

TEST_CASE("parity identity for one coherent mode") {
    auto rng = test_util::make_rng(32);
    static constexpr std::array<int, 1> m0{0};
    for (int i = 0; i < 300; ++i) {
        const cplx g = test_util::random_label(rng, 2.0);
        const auto s = state_vector::coherent({g});
        const double want = (1.0 - std::exp(-2.0 * std::norm(g))) / 2.0;
        CHECK_THAT(class_probability(s, {outcome_class::odd}, m0), WithinAbs(want, 1e-12));
    }
}

TEST_CASE("class completeness on grid states") {
    const auto s = grid_state(1.1, 0.7);
    static constexpr std::array<int, 2> both{0, 1};
    double total = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            total += class_probability(
                s, {static_cast<outcome_class>(a), static_cast<outcome_class>(b)}, both);
    CHECK_THAT(total, WithinAbs(1.0, 1e-10));
}

TEST_CASE("class probability agrees with truncated count sums") {
    const double g1 = 1.3;
    const auto s = grid_state(g1, 0.9);
    static constexpr std::array<int, 1> m0{0};
    const int n_max = 8 * static_cast<int>(std::ceil(g1 * g1)) + 24;

    for (outcome_class c :
         {outcome_class::zero, outcome_class::even_nonzero, outcome_class::odd}) {
        double summed = 0.0;
        for (int n = 0; n <= n_max; ++n) {
            const bool in_class = (c == outcome_class::zero && n == 0) ||
                                  (c == outcome_class::even_nonzero && n >= 2 && n % 2 == 0) ||
                                  (c == outcome_class::odd && n % 2 == 1);
            if (!in_class) continue;
            summed += norm_squared(project_photon_number(s, 0, n));
        }
        CHECK_THAT(class_probability(s, {c}, m0), WithinAbs(summed, 1e-8));
    }
}

TEST_CASE("heralding basics") {
    // measuring ZERO on a vacuum mode leaves the rest untouched
    auto rng = test_util::make_rng(33);
    const auto rest = test_util::random_normalized(rng, 1, 2);
    const auto joint = tensor(state_vector::coherent({cplx{0, 0}}), rest);
    static constexpr std::array<int, 1> m0{0};
    const auto h = herald_class(joint, {outcome_class::zero}, m0);
    CHECK_THAT(h.probability, WithinAbs(1.0, 1e-12));
    CHECK_THAT(fidelity(h.state, rest), WithinAbs(1.0, 1e-12));

    // an even cat never fires an odd count
    state_vector even(1);
    even.push_term({1, 0}, {cplx{1, 0}});
    even.push_term({1, 0}, {cplx{-1, 0}});
    const auto joint2 = tensor(normalize(even), rest);
    CHECK_THROWS_AS(herald_class(joint2, {outcome_class::odd}, m0), degenerate_state_error);
}

TEST_CASE("herald purity within a class") {
    const auto s = grid_state(1.2, 0.8);
    for (int n1 : {2, 4, 6}) {
        const auto a = normalize(project_photon_number(s, 0, n1));
        const auto b = normalize(project_photon_number(s, 0, n1 + 2));
        CHECK_THAT(fidelity(a, b), WithinAbs(1.0, 1e-10));
    }
    static constexpr std::array<int, 1> m0{0};
    const auto h = herald_class(s, {outcome_class::even_nonzero}, m0);
    CHECK_THAT(fidelity(h.state, normalize(project_photon_number(s, 0, 2))),
               WithinAbs(1.0, 1e-10));
}

TEST_CASE("off-grid modes are rejected") {
    state_vector s(1);
    s.push_term({0.7, 0}, {cplx{1.0, 0}});
    s.push_term({0.7, 0}, {cplx{0.5, 0}});  // second magnitude breaks the grid
    static constexpr std::array<int, 1> m0{0};
    CHECK_THROWS_AS(herald_class(normalize(s), {outcome_class::odd}, m0),
                    heterogeneous_class_error);
}

TEST_CASE("measured mode validation") {
    const auto s = grid_state(1.0, 1.0);
    static constexpr std::array<int, 2> dup{0, 0};
    static constexpr std::array<int, 1> oob{7};
    CHECK_THROWS_AS(class_probability(s, {outcome_class::zero, outcome_class::zero}, dup),
                    wiring_error);
    CHECK_THROWS_AS(class_probability(s, {outcome_class::zero}, oob), wiring_error);
}
