#pragma once

#include <string>

#include "povmkit/covariant.hpp"
#include "povmkit/povm.hpp"

namespace povmkit {

// Row-stochastic table: rows indexed by the spectral points of a reference
// sharp observable, columns by outcome atoms. Row x holds the probability
// measure the smearing spreads the point x over.
class MarkovKernel {
public:
    MarkovKernel(RealMatrix entries, double row_tol = 1e-10);

    static MarkovKernel identity(int n);
    static MarkovKernel uniform(int rows, int cols);

    int rows() const { return static_cast<int>(m_.rows()); }
    int cols() const { return static_cast<int>(m_.cols()); }
    double operator()(int x, int atom) const { return m_(x, atom); }
    const RealMatrix& entries() const { return m_; }

    // omega_Delta(x): row sum over the event's atoms.
    double event_weight(int x, const EventSet& event) const;
    double max_row_sum_deviation() const;

private:
    RealMatrix m_;
};

struct SmearedObservable {
    std::string base_basis;
    MarkovKernel kernel;
    DiscretePOVM povm;
};

// Marginal over the p (column) side: one atom per row r with effect
// sum over p of F({(r,p)}) and weight equal to the row's weight sum.
DiscretePOVM marginal_q(const DiscretePOVM& joint, const Tolerances& tol = {});
// Marginal over the q (row) side.
DiscretePOVM marginal_p(const DiscretePOVM& joint, const Tolerances& tol = {});

// F(atom) = sum_x omega[x][atom] P_x over the base PVM's projectors.
// Requires a projective base and exactly row-stochastic kernel rows.
SmearedObservable smear_pvm(const DiscretePOVM& base_pvm, const MarkovKernel& kernel,
                            const Tolerances& tol = {}, std::string base_basis = "position");

struct KernelExtraction {
    bool ok = false;
    bool diagonal = false;
    bool row_stochastic = false;
    double worst_offdiag = 0.0;
    int offending_atom = -1;
    double worst_row_dev = 0.0;
    RealMatrix entries;  // valid when diagonal
};

// If every effect is diagonal in the given basis (columns = basis vectors)
// within tol.equality, returns omega[x][atom] = <x|F({atom})|x> and checks
// row-stochasticity; otherwise reports the worst off-diagonal magnitude.
KernelExtraction extract_kernel(const DiscretePOVM& povm, const Matrix& basis,
                                const Tolerances& tol = {});

Matrix computational_basis(int d);
Matrix fourier_basis(int d);

// Cross-check that the q-marginal of the lattice construction equals the
// sharp position PVM smeared with omega[x][q] = |eta_{(x-q) mod d}|^2.
// Both sides are built independently. Entrywise deviation is the pass/fail
// metric; the spectral-norm deviation is reported alongside.
struct KernelIdentityDeviation {
    double entrywise = 0.0;
    double spectral = 0.0;
};
KernelIdentityDeviation marginal_kernel_identity_deviation(int d, const FiducialVector& eta,
                                                           const Tolerances& tol = {});
double marginal_kernel_identity_check(int d, const FiducialVector& eta, const Tolerances& tol = {});

// The analytic kernel used by the identity check.
MarkovKernel wh_position_kernel(int d, const FiducialVector& eta, double row_tol = 1e-10);

}  // namespace povmkit
