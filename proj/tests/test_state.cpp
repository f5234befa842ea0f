#include <catch_amalgamated.hpp>

#include "catsim/state.hpp"
#include "helpers.hpp"

using namespace catsim;
using Catch::Matchers::WithinAbs;

namespace {
state_vector cat(double a, double rel = 1.0) {
    state_vector s(1);
    s.push_term({1.0, 0.0}, {cplx{a, 0.0}});
    s.push_term({rel, 0.0}, {cplx{-a, 0.0}});
    return s;
}
}  // namespace

TEST_CASE("coherent overlap closed form") {
    CHECK_THAT(coherent_overlap({1, 0}, {1, 0}).real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(coherent_overlap({1, 0}, {1, 0}).imag(), WithinAbs(0.0, 1e-15));

    const cplx om = coherent_overlap({1, 0}, {-1, 0});
    CHECK_THAT(om.real(), WithinAbs(std::exp(-2.0), 1e-15));
    CHECK_THAT(om.imag(), WithinAbs(0.0, 1e-15));

    const cplx vac = coherent_overlap({0, 1}, {0, 0});
    CHECK_THAT(vac.real(), WithinAbs(std::exp(-0.5), 1e-15));
    CHECK_THAT(vac.imag(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("overlap magnitude identity on random labels") {
    auto g = test_util::make_rng(11);
    for (int i = 0; i < 1000; ++i) {
        const cplx b = test_util::random_label(g, 2.0);
        const cplx d = test_util::random_label(g, 2.0);
        const double want = std::exp(-std::norm(b - d) / 2.0);
        CHECK_THAT(std::abs(coherent_overlap(b, d)), WithinAbs(want, 1e-14));
    }
}

TEST_CASE("inner product small cases") {
    const state_vector one = state_vector::coherent({cplx{1, 0}});
    CHECK_THAT(inner_product(one, one).real(), WithinAbs(1.0, 1e-15));

    // 2x2 Gram sum of the unnormalized |1> + |-1>:
    // <1|1> + <-1|-1> + <1|-1> + <-1|1> = 2 + 2 e^-2
    const state_vector c = cat(1.0);
    CHECK_THAT(inner_product(c, c).real(), WithinAbs(2.0 + 2.0 * std::exp(-2.0), 1e-14));

    // odd vs even cat: exactly orthogonal
    const state_vector odd = cat(1.0, -1.0);
    CHECK_THAT(std::abs(inner_product(odd, c)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("inner product rejects mode mismatch") {
    CHECK_THROWS_AS(inner_product(state_vector::coherent({cplx{1, 0}}),
                                  state_vector::coherent({cplx{1, 0}, cplx{0, 0}})),
                    dimension_error);
}

TEST_CASE("conjugate symmetry") {
    auto g = test_util::make_rng(12);
    for (int i = 0; i < 200; ++i) {
        const auto a = test_util::random_state(g, 2, 3);
        const auto b = test_util::random_state(g, 2, 4);
        const cplx ab = inner_product(a, b);
        const cplx ba = inner_product(b, a);
        CHECK_THAT(std::abs(ab - std::conj(ba)), WithinAbs(0.0, 1e-14));
    }
}

TEST_CASE("cauchy-schwarz on random states") {
    auto g = test_util::make_rng(13);
    for (int i = 0; i < 500; ++i) {
        const auto a = test_util::random_state(g, 2, 3);
        const auto b = test_util::random_state(g, 2, 3);
        const double lhs = std::norm(inner_product(a, b));
        const double rhs = norm_squared(a) * norm_squared(b);
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("gram positive semidefiniteness") {
    auto g = test_util::make_rng(14);
    for (int i = 0; i < 500; ++i) {
        const auto a = test_util::random_state(g, 3, 5);
        CHECK(inner_product(a, a).real() >= -1e-12);
    }
}

TEST_CASE("norm and normalize") {
    CHECK_THAT(norm(state_vector::coherent({cplx{0.7, 0.3}})), WithinAbs(1.0, 1e-15));

    // even cat with equal weights: norm = sqrt(2 + 2 e^-2) for unit
    // coefficients; with 1/sqrt2 coefficients sqrt(1 + e^-2).
    state_vector c(1);
    const double r = 1.0 / std::numbers::sqrt2;
    c.push_term({r, 0.0}, {cplx{1, 0}});
    c.push_term({r, 0.0}, {cplx{-1, 0}});
    CHECK_THAT(norm(c), WithinAbs(std::sqrt(1.0 + std::exp(-2.0)), 1e-14));
    CHECK_THAT(1.0 / norm(c), WithinAbs(0.9385079, 1e-7));

    const state_vector n = normalize(c);
    CHECK_THAT(norm(n), WithinAbs(1.0, 1e-12));
    CHECK(is_normalized(n));

    // lone term: normalization constant is 1
    state_vector lone(1);
    lone.push_term({1.0, 0.0}, {cplx{1, 0}});
    CHECK_THAT(norm(lone), WithinAbs(1.0, 1e-15));

    CHECK_THROWS_AS(normalize(scale({0, 0}, c)), degenerate_state_error);
}

TEST_CASE("tensor product") {
    const auto a = state_vector::coherent({cplx{1, 0}});
    const auto b = state_vector::coherent({cplx{0, 1}});
    const auto ab = tensor(a, b);
    REQUIRE(ab.mode_count() == 2);
    REQUIRE(ab.terms().size() == 1);
    CHECK(ab.terms()[0].labels[0] == cplx{1, 0});
    CHECK(ab.terms()[0].labels[1] == cplx{0, 1});

    auto g = test_util::make_rng(15);
    const auto x = test_util::random_state(g, 1, 4);
    const auto y = test_util::random_state(g, 2, 3);
    CHECK(tensor(x, y).terms().size() == 12);

    // 0-mode scalar is the identity
    const auto idl = tensor(state_vector::scalar_one(), x);
    const auto idr = tensor(x, state_vector::scalar_one());
    CHECK(idl.terms().size() == x.terms().size());
    CHECK_THAT(std::abs(inner_product(idl, x) - inner_product(x, x)), WithinAbs(0.0, 1e-14));
    CHECK_THAT(std::abs(inner_product(idr, x) - inner_product(x, x)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("add, scale, canonicalize") {
    const auto a = state_vector::coherent({cplx{0.5, 0}});
    const auto sum = canonicalize(add(a, a));
    REQUIRE(sum.terms().size() == 1);
    CHECK_THAT(std::abs(sum.terms()[0].coeff - cplx{2.0, 0.0}), WithinAbs(0.0, 1e-15));

    CHECK(canonicalize(scale({0, 0}, cat(1.0))).empty());

    CHECK_THROWS_AS(add(a, state_vector::coherent({cplx{1, 0}, cplx{0, 0}})), dimension_error);
}

TEST_CASE("canonicalize preserves inner products against a probe basis") {
    auto g = test_util::make_rng(16);
    for (int i = 0; i < 100; ++i) {
        auto s = test_util::random_state(g, 2, 3);
        // duplicate a term with a nearby label to force a merge
        auto terms = s.terms();
        auto dup = terms[0];
        dup.labels[0] += cplx{1e-12, -1e-12};
        terms.push_back(dup);
        const state_vector noisy(2, terms);
        const state_vector canon = canonicalize(noisy);
        CHECK(canon.terms().size() <= noisy.terms().size());
        for (int p = 0; p < 4; ++p) {
            const auto probe = test_util::random_state(g, 2, 2);
            CHECK_THAT(std::abs(inner_product(probe, canon) - inner_product(probe, noisy)),
                       WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("fidelity") {
    auto g = test_util::make_rng(17);
    const auto psi = test_util::random_normalized(g, 2, 3);
    CHECK_THAT(fidelity(psi, psi), WithinAbs(1.0, 1e-12));

    CHECK_THAT(fidelity(state_vector::coherent({cplx{1, 0}}), state_vector::coherent({cplx{-1, 0}})),
               WithinAbs(std::exp(-4.0), 1e-14));

    CHECK_THAT(fidelity(cat(1.0), cat(1.0, -1.0)), WithinAbs(0.0, 1e-12));

    CHECK_THROWS_AS(fidelity(scale({0, 0}, cat(1.0)), cat(1.0)), degenerate_state_error);
}

TEST_CASE("non-finite values are rejected") {
    state_vector s(1);
    CHECK_THROWS_AS(s.push_term({std::nan(""), 0.0}, {cplx{1, 0}}), precondition_error);
    CHECK_THROWS_AS(s.push_term({1.0, 0.0}, {cplx{std::numeric_limits<double>::infinity(), 0}}),
                    precondition_error);
}

TEST_CASE("permute modes") {
    state_vector s(3);
    s.push_term({1.0, 0.0}, {cplx{1, 0}, cplx{2, 0}, cplx{3, 0}});
    static constexpr std::array<int, 3> order{2, 0, 1};
    const auto p = permute_modes(s, order);
    CHECK(p.terms()[0].labels[0] == cplx{3, 0});
    CHECK(p.terms()[0].labels[1] == cplx{1, 0});
    CHECK(p.terms()[0].labels[2] == cplx{2, 0});
}
