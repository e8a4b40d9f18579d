#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siegert/feshbach.hpp"

using namespace siegert;

namespace {

std::vector<cplx> seed_grid(double J = 1.0) {
    std::vector<cplx> s;
    for (int i = 0; i <= 16; ++i) {
        for (double im : {-0.6, -0.2, 0.2, 0.6}) s.emplace_back(J * (-3.2 + 0.4 * i), J * im);
    }
    return s;
}

// Union of converged nonlinear solutions on both branches, deduplicated in E.
std::vector<cplx> nonlinear_energies(const LatticeModel& m) {
    std::vector<cplx> out;
    for (Branch b : {Branch::retarded, Branch::advanced}) {
        for (const auto& r : solve_nonlinear_eig_seeds(m, b, seed_grid(m.lead_hopping))) {
            const bool dup = std::any_of(out.begin(), out.end(), [&](cplx e) { return std::abs(e - r.E) < 1e-8; });
            if (!dup) out.push_back(r.E);
        }
    }
    return out;
}

void expect_same_sets(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
    EXPECT_EQ(a.size(), b.size());
    for (cplx x : a) {
        const bool hit = std::any_of(b.begin(), b.end(), [&](cplx y) { return std::abs(x - y) < tol; });
        EXPECT_TRUE(hit) << x;
    }
    for (cplx y : b) {
        const bool hit = std::any_of(a.begin(), a.end(), [&](cplx x) { return std::abs(x - y) < tol; });
        EXPECT_TRUE(hit) << y;
    }
}

std::vector<cplx> energies_of(const std::vector<ComplexPole>& poles) {
    std::vector<cplx> e;
    for (const auto& p : poles) e.push_back(p.E);
    return e;
}

}  // namespace

TEST(SelfEnergy, Examples) {
    EXPECT_LT(std::abs(lead_self_energy(0.0, 1.0, Branch::retarded).value - cplx(0.0, -1.0)), 1e-15);
    EXPECT_LT(std::abs(lead_self_energy(0.0, 1.0, Branch::advanced).value - cplx(0.0, 1.0)), 1e-15);
    const cplx s3 = lead_self_energy(3.0, 1.0, Branch::retarded).value;
    EXPECT_NEAR(s3.real(), (3.0 - std::sqrt(5.0)) / 2.0, 1e-15);
    EXPECT_EQ(s3.imag(), 0.0);
}

TEST(SelfEnergy, BandEdgeIsSingular) {
    EXPECT_THROW(lead_self_energy(2.0, 1.0, Branch::retarded), BranchSingularity);
    EXPECT_THROW(lead_self_energy(-4.0, 2.0, Branch::advanced), BranchSingularity);
    EXPECT_THROW(lead_self_energy(0.0, 0.0, Branch::retarded), ValidationError);
}

TEST(SelfEnergy, RealAxisMatchesTextbookFormula) {
    for (double J : {0.5, 1.0, 2.0}) {
        for (double E = -3.0 * J; E <= 3.0 * J; E += 0.0137 * J) {
            if (std::abs(std::abs(E) - 2 * J) < 1e-9) continue;
            const cplx ref = oracle::sigma_retarded_real(E, J);
            const cplx ret = lead_self_energy(E, J, Branch::retarded).value;
            const cplx adv = lead_self_energy(E, J, Branch::advanced).value;
            EXPECT_LT(std::abs(ret - ref), 1e-12) << E;
            EXPECT_LT(std::abs(adv - std::conj(ret)), 1e-12) << E;
            if (std::abs(E) < 2 * J) {
                EXPECT_LT(ret.imag(), 0.0);
                EXPECT_GT(adv.imag(), 0.0);
            } else {
                EXPECT_EQ(ret.imag(), 0.0);
                EXPECT_LE(std::abs(ret), std::abs(E) / 2.0);
            }
        }
    }
}

TEST(SelfEnergy, FixedPointEverywhere) {
    const double J = 1.3;
    for (Branch b : {Branch::retarded, Branch::advanced}) {
        for (int i = 0; i < 60; ++i) {
            for (int j = 0; j < 60; ++j) {
                const cplx E(-5.0 + 10.0 * i / 59.0, -5.0 + 10.0 * j / 59.0);
                const cplx s = lead_self_energy(E, J, b).value;
                EXPECT_LT(std::abs(s - J * J / (E - s)), 1e-12);
            }
        }
    }
}

TEST(EffectiveHamiltonian, DecoupledEqualsSystem) {
    LatticeModel m{{0.3, -0.2, 0.7}, {0.4, 0.9}, 1.0, 0.0, 0.0};
    const auto h = effective_hamiltonian(m, cplx(0.4, 0.0), Branch::retarded);
    EXPECT_EQ((h.matrix - system_hamiltonian(m)).norm(), 0.0);
    EXPECT_EQ(h.hermiticity_defect(), 0.0);
    EXPECT_EQ(system_hamiltonian(m)(0, 1), cplx(-0.4));
}

TEST(EffectiveHamiltonian, SingleSiteScalar) {
    const auto m = LatticeModel::single_impurity(0.8);
    for (cplx E : {cplx(0.3, 0.0), cplx(2.7, 0.0), cplx(-1.0, 0.5)}) {
        const auto h = effective_hamiltonian(m, E, Branch::retarded);
        const cplx s = lead_self_energy(E, 1.0, Branch::retarded).value;
        EXPECT_LT(std::abs(h.matrix(0, 0) - (0.8 + 2.0 * s)), 1e-15);
    }
}

TEST(EffectiveHamiltonian, HermiticityDefect) {
    const double J = 1.5;
    LatticeModel one{{0.1}, {}, J, 0.7, 0.4};
    LatticeModel two{{0.1, 0.2}, {0.3}, J, 0.7, 0.4};
    for (double E : {-1.0, 0.0, 2.2}) {
        const cplx s = lead_self_energy(E, J, Branch::retarded).value;
        const double im = std::abs(s.imag());
        const auto h1 = effective_hamiltonian(one, E, Branch::retarded);
        EXPECT_NEAR(h1.hermiticity_defect(), 2.0 * im * (0.49 + 0.16) / (J * J), 1e-14);
        const auto h2 = effective_hamiltonian(two, E, Branch::retarded);
        EXPECT_NEAR(h2.hermiticity_defect(), 2.0 * im * std::hypot(0.49, 0.16) / (J * J), 1e-14);
        if (std::abs(E) < 2 * J) { EXPECT_GT(h2.hermiticity_defect(), 0.0); }
        // the advanced matrix is the adjoint of the retarded one on the real axis
        const auto a2 = effective_hamiltonian(two, E, Branch::advanced);
        EXPECT_LT((a2.matrix - h2.matrix.adjoint()).norm(), 1e-14);
    }
}

TEST(NonlinearEig, PerfectChainHasNoPole) {
    const auto m = LatticeModel::single_impurity(0.0);
    for (cplx seed : {cplx(0.5, -0.3), cplx(2.5, 0.0), cplx(-1.0, 0.2)}) {
        for (Branch b : {Branch::retarded, Branch::advanced}) {
            EXPECT_FALSE(solve_nonlinear_eig(m, b, seed).converged) << seed;
        }
    }
    EXPECT_TRUE(solve_nonlinear_eig_seeds(m, Branch::retarded, seed_grid()).empty());
}

TEST(NonlinearEig, ImpurityPoles) {
    for (double v0 : {1.0, -2.0, 0.5}) {
        const auto m = LatticeModel::single_impurity(v0);
        const double e = std::sqrt(4.0 + v0 * v0);
        const auto ret = solve_nonlinear_eig(m, Branch::retarded, cplx(std::copysign(2.5, v0), 0.0));
        ASSERT_TRUE(ret.converged) << ret.diagnostic;
        EXPECT_NEAR(ret.E.real(), std::copysign(e, v0), 1e-10);
        EXPECT_NEAR(ret.E.imag(), 0.0, 1e-10);
        const auto all = nonlinear_energies(m);
        expect_same_sets(all, {cplx(e, 0.0), cplx(-e, 0.0)}, 1e-10);
    }
}

TEST(NonlinearEig, SymmetricDotConjugateSeeds) {
    const auto m = LatticeModel::symmetric_dot();
    const auto ret = solve_nonlinear_eig(m, Branch::retarded, cplx(0.6, -0.2));
    ASSERT_TRUE(ret.converged) << ret.diagnostic;
    EXPECT_LT(ret.E.imag(), 0.0);
    const auto adv = solve_nonlinear_eig(m, Branch::advanced, cplx(0.6, 0.2));
    ASSERT_TRUE(adv.converged) << adv.diagnostic;
    EXPECT_LT(std::abs(adv.E - std::conj(ret.E)), 1e-10);
    EXPECT_LT(std::abs(adv.sigma - std::conj(ret.sigma)), 1e-10);
}

TEST(NonlinearEig, BranchPoleSetsAreConjugate) {
    for (const auto& m : {LatticeModel::symmetric_dot(), LatticeModel::two_site_resonator()}) {
        const auto ret = solve_nonlinear_eig_seeds(m, Branch::retarded, seed_grid());
        const auto adv = solve_nonlinear_eig_seeds(m, Branch::advanced, seed_grid());
        std::vector<cplx> a, b;
        for (const auto& r : ret) a.push_back(std::conj(r.E));
        for (const auto& r : adv) b.push_back(r.E);
        expect_same_sets(a, b, 1e-8);
    }
}

TEST(NonlinearEig, BandEdgeSeed) {
    EXPECT_THROW(solve_nonlinear_eig(LatticeModel::two_site_resonator(), Branch::retarded, cplx(2.0, 0.0)),
                 BranchSingularity);
}

TEST(LatticePoles, DecoupledHasNone) {
    LatticeModel m{{0.3, 0.1}, {0.5}, 1.0, 0.0, 0.0};
    EXPECT_TRUE(lattice_siegert_poles(m).poles.empty());
}

TEST(LatticePoles, ImpurityMatchesAlgebra) {
    for (double v0 : {1.0, 3.0, -0.7}) {
        const auto res = lattice_siegert_poles(LatticeModel::single_impurity(v0));
        const double e = std::sqrt(4.0 + v0 * v0);
        ASSERT_EQ(res.poles.size(), 2u);
        EXPECT_NEAR(res.poles[0].E.real(), -e, 1e-10);
        EXPECT_NEAR(res.poles[1].E.real(), e, 1e-10);
        for (const auto& p : res.poles) {
            EXPECT_TRUE(p.certified);
            EXPECT_TRUE(p.cls == PoleClass::bound || p.cls == PoleClass::anti_bound);
        }
    }
}

TEST(LatticePoles, MatchPolynomialOracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> onsite(-1.5, 1.5), hop(0.3, 1.2), g(0.2, 1.0);
    std::vector<LatticeModel> models{LatticeModel::two_site_resonator(), LatticeModel::symmetric_dot()};
    for (int n = 0; n < 6; ++n) {
        LatticeModel m;
        const int size = 1 + n % 3;
        for (int i = 0; i < size; ++i) m.onsite.push_back(onsite(rng));
        for (int i = 0; i + 1 < size; ++i) m.intra_hopping.push_back(hop(rng));
        m.g_left = g(rng);
        m.g_right = g(rng);
        models.push_back(m);
    }
    for (const auto& m : models) {
        std::vector<cplx> ref;
        for (cplx kappa : oracle::lattice_pole_kappas(m.onsite, m.intra_hopping, m.lead_hopping, m.g_left, m.g_right)) {
            if (std::abs(kappa.imag()) < 2.0) ref.push_back(-2.0 * m.lead_hopping * std::cos(kappa));
        }
        const auto res = lattice_siegert_poles(m);
        for (const auto& p : res.poles) EXPECT_TRUE(p.certified);
        expect_same_sets(energies_of(res.poles), ref, 1e-8);
    }
}

TEST(LatticePoles, RouteEquivalence) {
    for (const auto& m : {LatticeModel::single_impurity(1.0), LatticeModel::two_site_resonator(),
                          LatticeModel::symmetric_dot()}) {
        expect_same_sets(energies_of(lattice_siegert_poles(m).poles), nonlinear_energies(m), 1e-8);
    }
}

TEST(LatticePoles, OneSidedCoupling) {
    LatticeModel m{{0.2, -0.4}, {0.6}, 1.0, 0.0, 0.5};
    LatticeModel mirror{{-0.4, 0.2}, {0.6}, 1.0, 0.5, 0.0};
    expect_same_sets(energies_of(lattice_siegert_poles(m).poles), energies_of(lattice_siegert_poles(mirror).poles),
                     1e-8);
    LatticeModel split{{0.2, -0.4}, {0.0}, 1.0, 0.5, 0.5};
    EXPECT_THROW(lattice_siegert_poles(split), ValidationError);
}

TEST(Biorthogonal, ClosedFormTwoByTwo) {
    const auto o = oracle::non_hermitian_2x2();
    const auto sys = biorthogonal_system(o.h);
    EXPECT_LT(sys.biorthogonality_residual(), 1e-12);
    Eigen::Vector2cd f(1.0, 0.0);
    const auto e = biorthogonal_expand(o.h, f);
    EXPECT_LT(e.reconstruction_residual, 1e-12);
    for (int n = 0; n < 2; ++n) {
        // match the library's eigenpair to the closed-form one
        Eigen::Index j = 0;
        (sys.eigenvalues.array() - o.eigenvalues[n]).abs().minCoeff(&j);
        EXPECT_LT(std::abs(sys.eigenvalues(j) - o.eigenvalues[n]), 1e-12);
        // the projector psi_n phi_n is normalization independent
        const Eigen::Matrix2cd p_lib = sys.right.col(j) * sys.left.row(j);
        const Eigen::Matrix2cd p_ref = o.right[n] * o.left[n];
        EXPECT_LT((p_lib - p_ref).norm(), 1e-12);
        EXPECT_LT(std::abs((o.left[n] * f)(0) * o.right[n](0) - e.coefficients(j) * sys.right(0, j)), 1e-12);
    }
}

TEST(Biorthogonal, HermitianReducesToOrthonormal) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 7;
        Eigen::MatrixXcd a(n, n);
        for (int i = 0; i < n; ++i) for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
        const Eigen::MatrixXcd h = a + a.adjoint();
        Eigen::VectorXcd f(n);
        for (int i = 0; i < n; ++i) f(i) = cplx(g(rng), g(rng));
        const auto e = biorthogonal_expand(h, f);
        EXPECT_NEAR(e.biorthogonal_probability, e.square_modulus, 1e-12 * e.square_modulus);
    }
}

TEST(Biorthogonal, EigenvectorExpandsToDelta) {
    const auto o = oracle::non_hermitian_2x2();
    const auto sys = biorthogonal_system(o.h);
    for (int m = 0; m < 2; ++m) {
        const auto e = biorthogonal_expand(o.h, sys.right.col(m));
        for (int n = 0; n < 2; ++n) EXPECT_LT(std::abs(e.coefficients(n) - (n == m ? 1.0 : 0.0)), 1e-12);
    }
}

TEST(Biorthogonal, RandomCompleteness) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 8;
        Eigen::MatrixXcd h(n, n);
        for (int i = 0; i < n; ++i) for (int j = 0; j < n; ++j) h(i, j) = cplx(g(rng), g(rng));
        const auto sys = biorthogonal_system(h);
        EXPECT_LT(sys.biorthogonality_residual(), 1e-10);
        EXPECT_LT(sys.completeness_residual(), 1e-10);
    }
}

TEST(Biorthogonal, ExceptionalPointRefused) {
    Eigen::Matrix2cd jordan;
    jordan << 1.0, 1.0, 0.0, 1.0;
    EXPECT_THROW(biorthogonal_system(jordan), NumericalError);
}

TEST(Biorthogonal, DegenerateButDiagonalizable) {
    // repeated eigenvalue with a full eigenbasis takes the inverse route
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Identity();
    h(2, 2) = cplx(0.5, -0.3);
    const auto sys = biorthogonal_system(h);
    EXPECT_TRUE(sys.left_from_inverse);
    EXPECT_LT(sys.completeness_residual(), 1e-12);
}
