#include <doctest.h>

#include <cmath>

#include "povmkit/analysis.hpp"
#include "povmkit/covariant.hpp"
#include "povmkit/povm.hpp"
#include "povmkit/rng.hpp"

using namespace povmkit;

namespace {

DiscretePOVM wh(int d, const FiducialVector& eta) {
    return build_wh_povm(WeylSystem(d), eta);
}

// Two copies of 0.6 I on d=2: individually valid effects, sum 1.2 I.
DiscretePOVM overweight_pair() {
    std::vector<Effect> effects;
    effects.push_back(Effect::from_matrix(0.6 * Matrix::Identity(2, 2)));
    effects.push_back(Effect::from_matrix(0.6 * Matrix::Identity(2, 2)));
    OutcomeSpace space = OutcomeSpace::abstract_space({1.0, 1.0}, {MeasureKind::CountingNormalized, 2.0, false});
    return DiscretePOVM::assemble(std::move(space), 2, std::move(effects));
}

}  // namespace

TEST_CASE("effect_of basics") {
    const DiscretePOVM pvm = make_sharp_position_pvm(4);
    SUBCASE("empty event is the zero operator") {
        const Effect z = effect_of(pvm, EventSet{});
        CHECK(spectral_norm(z) == 0.0);
        CHECK(z.to_dense().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("full event is the identity") {
        const Effect full = effect_of(pvm, EventSet::full(4));
        CHECK((full.to_dense() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("out-of-range atom index is rejected") {
        CHECK_THROWS_AS(effect_of(pvm, EventSet({7})), std::invalid_argument);
    }
}

TEST_CASE("effect_of lattice column reproduces the projector") {
    // d=2, eta=|0>: atoms (q,p) carry (1/2)|q><q|; the q=0 column sums to |0><0|.
    const DiscretePOVM povm = wh(2, FiducialVector::basis(2, 0));
    const Effect e = effect_of(povm, EventSet({0, 1}));
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    CHECK((e.to_dense() - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("validate_povm") {
    SUBCASE("sharp observable passes with zero defect") {
        const auto rep = validate_povm(make_sharp_position_pvm(4));
        CHECK(rep.passed);
        CHECK(rep.normalization_defect == 0.0);
        for (const auto& row : rep.atoms) {
            CHECK(row.positive);
            CHECK(row.bounded);
        }
    }
    SUBCASE("overweight pair fails normalization with defect 0.2") {
        const auto rep = validate_povm(overweight_pair());
        CHECK_FALSE(rep.passed);
        CHECK(rep.atoms_ok);
        CHECK(rep.normalization_defect == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("lattice constructions pass at d = 2..8 by direct summation") {
        Rng rng(5);
        for (int d = 2; d <= 8; ++d) {
            const DiscretePOVM povm = wh(d, FiducialVector::custom(StateVector(rng.unit_vector(d))));
            const auto rep = validate_povm(povm);
            CHECK(rep.passed);
            CHECK(rep.normalization_defect <= 1e-10);
        }
    }
    SUBCASE("nine uniform-fiducial atoms at d=3 resolve the identity") {
        const auto rep = validate_povm(wh(3, FiducialVector::uniform(3)));
        CHECK(rep.passed);
        CHECK(rep.normalization_defect <= 1e-10);
    }
}

TEST_CASE("is_commutative") {
    SUBCASE("diagonal observable commutes") {
        const auto res = is_commutative(make_sharp_position_pvm(3), 1e-12);
        CHECK(res.commutative);
    }
    SUBCASE("generic lattice fiducial fails with a strong witness") {
        Vector eta(2);
        eta << std::cos(M_PI / 6.0), std::sin(M_PI / 6.0);
        const auto res = is_commutative(wh(2, FiducialVector::custom(StateVector(eta))), 1e-12);
        CHECK_FALSE(res.commutative);
        // Worst pair norm is sqrt(3)/16 for this fiducial.
        CHECK(res.worst_norm == doctest::Approx(std::sqrt(3.0) / 16.0).epsilon(1e-10));
        CHECK(res.worst_norm > 0.1);
    }
    SUBCASE("the |+> fiducial is a degenerate commutative point at d=2") {
        // The displacement orbit of (|0>+|1>)/sqrt(2) is the orthogonal pair
        // {|+>,|->}, so every atom pair commutes despite the generic case failing.
        const auto res = is_commutative(wh(2, FiducialVector::uniform(2)), 1e-12);
        CHECK(res.commutative);
        CHECK(res.worst_norm <= 1e-14);
    }
}

TEST_CASE("is_projective") {
    SUBCASE("sharp observable is projective") {
        CHECK(is_projective(make_sharp_position_pvm(4), 1e-10).projective);
    }
    SUBCASE("subnormalized lattice atoms are not") {
        const auto res = is_projective(wh(2, FiducialVector::basis(2, 0)), 1e-10);
        CHECK_FALSE(res.projective);
        // (1/2 |0><0|)^2 - 1/2 |0><0| has norm 1/4.
        CHECK(res.worst_violation >= 0.25 - 1e-12);
    }
    SUBCASE("uniform trivial observable is not") {
        std::vector<Effect> effects;
        effects.push_back(Effect::from_matrix(0.5 * Matrix::Identity(2, 2)));
        effects.push_back(Effect::from_matrix(0.5 * Matrix::Identity(2, 2)));
        OutcomeSpace space = OutcomeSpace::abstract_space({1.0, 1.0}, {MeasureKind::CountingNormalized, 2.0, false});
        const DiscretePOVM povm = DiscretePOVM::assemble(std::move(space), 2, std::move(effects));
        CHECK_FALSE(is_projective(povm, 1e-10).projective);
    }
}

TEST_CASE("spectrum_support") {
    SUBCASE("zero atom drops out") {
        std::vector<Effect> effects;
        Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
        e0[0] = 1.0;
        e1[1] = 1.0;
        effects.push_back(Effect::rank_one(1.0, e0));
        effects.push_back(Effect::rank_one(1.0, e1));
        effects.push_back(Effect::zero(2));
        OutcomeSpace space = OutcomeSpace::line({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0},
                                                {MeasureKind::CountingNormalized, 3.0, false});
        const DiscretePOVM povm = DiscretePOVM::assemble(std::move(space), 2, std::move(effects));
        CHECK(spectrum_support(povm, 1e-12) == EventSet({0, 1}));
    }
    SUBCASE("every lattice atom is in the support") {
        const DiscretePOVM povm = wh(3, FiducialVector::uniform(3));
        CHECK(spectrum_support(povm, 1e-12).size() == 9);
        for (int i = 0; i < 9; ++i)
            CHECK(spectral_norm(povm.atom_effect(i)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("far cells of a wide coherent grid drop out") {
        const DiscretePOVM povm =
            build_coherent_povm(CoherentGrid::make(2, 6.0, 0.5), FiducialVector::basis(2, 0), {}, 1.0);
        const EventSet support = spectrum_support(povm, 1e-12);
        CHECK(support.size() > 0);
        CHECK(support.size() < povm.atom_count());
        // Corner cell sits at radius ~8.1; its truncated overlap is below 1e-12.
        CHECK_FALSE(support.contains(0));
        // Center-adjacent cell survives.
        const int n = povm.space().rows();
        CHECK(support.contains((n / 2) * n + n / 2));
    }
}

TEST_CASE("outcome_probability") {
    const DiscretePOVM pvm = make_sharp_position_pvm(4);
    SUBCASE("normalization and sharp localization") {
        const StateVector psi = StateVector::basis(4, 0);
        CHECK(outcome_probability(pvm, psi, EventSet::full(4)).value == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(outcome_probability(pvm, psi, EventSet({0})).value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(outcome_probability(pvm, psi, EventSet({1})).value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("lattice pinned value") {
        const DiscretePOVM povm = wh(2, FiducialVector::basis(2, 0));
        const double p = outcome_probability(povm, StateVector::basis(2, 0), EventSet({0})).value;
        CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(outcome_probability(pvm, StateVector::basis(3, 0), EventSet({0})),
                        std::invalid_argument);
    }
}

TEST_CASE("event algebra properties on a lattice construction") {
    Rng rng(17);
    const int d = 3;
    const DiscretePOVM povm = wh(d, FiducialVector::custom(StateVector(rng.unit_vector(d))));
    const int n = povm.atom_count();
    for (int trial = 0; trial < 40; ++trial) {
        const EventSet a = rng.event(n);
        const EventSet b = rng.event(n).minus(a);

        // Additivity over disjoint events, entrywise.
        const Matrix lhs = effect_of(povm, a.unite(b)).to_dense();
        const Matrix rhs = effect_of(povm, a).to_dense() + effect_of(povm, b).to_dense();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);

        // Monotonicity of norms under event inclusion.
        CHECK(spectral_norm(effect_of(povm, a)) <=
              spectral_norm(effect_of(povm, a.unite(b))) + 1e-12);

        // Complement law.
        const Matrix full = effect_of(povm, EventSet::full(n)).to_dense();
        const Matrix sum = effect_of(povm, a).to_dense() + effect_of(povm, a.complement(n)).to_dense();
        CHECK((full - sum).cwiseAbs().maxCoeff() <= 1e-13);

        // Probability additivity for a fixed state.
        const StateVector psi(rng.unit_vector(d));
        const double pa = outcome_probability(povm, psi, a).raw;
        const double pb = outcome_probability(povm, psi, b).raw;
        const double pab = outcome_probability(povm, psi, a.unite(b)).raw;
        CHECK(std::abs(pab - pa - pb) <= 1e-12);
    }
}

TEST_CASE("projective observables have zero-one event norms") {
    const DiscretePOVM pvm = make_sharp_position_pvm(4);
    REQUIRE(is_projective(pvm, 1e-10).projective);
    for (const auto& ev : analysis_events(pvm.space(), 0)) {
        const double norm = spectral_norm(effect_of(pvm, ev));
        const bool zero = std::abs(norm) <= 1e-10;
        const bool one = std::abs(norm - 1.0) <= 1e-10;
        CHECK((zero || one));
    }
}
