#pragma once

#include <optional>
#include <string>
#include <vector>

#include "povmkit/povm.hpp"

namespace povmkit {

// Discrete Weyl pair on dimension d: shift X|j> = |j+1 mod d>, clock
// Z|j> = w^j |j> with w = exp(2 pi i / d), so Z X = w X Z. Displacements
// D(q,p) = X^q Z^p use one shared phase table, making the dense and
// vector paths bit-identical.
class WeylSystem {
public:
    explicit WeylSystem(int d);

    int dim() const { return d_; }
    const Matrix& shift() const { return x_; }
    const Matrix& clock() const { return z_; }
    Complex root_of_unity(int64_t power) const;  // w^power

    Matrix displacement(int q, int p) const;
    Vector displace(int q, int p, const Vector& v) const;

private:
    int d_;
    Matrix x_;
    Matrix z_;
    std::vector<Complex> omega_;  // w^0 .. w^{d-1}
};

// Fiducial vector: the unit vector whose displacement orbit generates the
// rank-one atoms of a covariant construction.
struct FiducialVector {
    enum class Label { Basis, Uniform, Gaussian, Custom };

    Label label = Label::Basis;
    int basis_index = 0;
    double width = 1.0;
    StateVector state;

    static FiducialVector basis(int dim, int index);
    static FiducialVector uniform(int dim);
    // Wrapped discrete gaussian on Z_d, |eta_j|^2 ~ exp(-dist(j,0)^2 / (2 width^2)).
    static FiducialVector gaussian_lattice(int dim, double width);
    // Squeezed vacuum on the Fock basis; width is the position-quadrature
    // scale (width 1 = vacuum). Widths outside [0.25, 4] are rejected so the
    // Fock truncation stays honest.
    static FiducialVector gaussian_fock(int fock_dim, double width);
    static FiducialVector custom(StateVector v);

    std::string label_name() const;
};

// Square phase-space grid for the truncated coherent-state family.
struct CoherentGrid {
    int fock_dim = 0;        // N >= 2
    double half_width = 0.0; // L > 0
    double cell_size = 0.0;  // 0 < h <= L, 2L/h integral
    int cells_per_side = 0;

    static CoherentGrid make(int fock_dim, double half_width, double cell_size);
};

// Covariant lattice construction: atoms (1/d) |D(q,p) eta><D(q,p) eta| over
// the d^2 lattice points, weight 1/d each. Exact resolution of the identity;
// the recorded defect is pure roundoff.
DiscretePOVM build_wh_povm(const WeylSystem& sys, const FiducialVector& eta,
                           const Tolerances& tol = {},
                           std::optional<double> defect_threshold = std::nullopt);

// N x N Fock block of the displacement operator exp(alpha a^+ - conj(alpha) a).
// A block of a unitary: columns are subnormalized, and the column over the
// vacuum is the cut coherent-state amplitude vector.
Matrix truncated_displacement_block(int fock_dim, Complex alpha);

// Truncated coherent-state construction: atoms (h^2/pi) |a_c><a_c| at the
// cell centers, where |a_c> is the displaced fiducial with its Fock expansion
// cut at N. The cut vectors are kept subnormalized so the atom sum stays
// below the identity and the truncation error lands entirely in the recorded
// defect. Rejects the grid when the defect exceeds the threshold, suggesting
// a larger half-width or Fock dimension.
DiscretePOVM build_coherent_povm(const CoherentGrid& grid, const FiducialVector& eta,
                                 const Tolerances& tol = {},
                                 std::optional<double> defect_threshold = std::nullopt);

// Same N and L with the cell size halved per level.
std::vector<DiscretePOVM> build_coherent_family(const CoherentGrid& coarsest,
                                                const FiducialVector& eta, int levels,
                                                const Tolerances& tol = {},
                                                std::optional<double> defect_threshold = std::nullopt);

// max over atoms x of || D(a,b) F({x}) D(a,b)^+ - F({x + (a,b)}) ||.
double covariance_check(const DiscretePOVM& povm, const WeylSystem& sys, int shift_q, int shift_p);

struct AbsoluteContinuity {
    bool finite = true;
    double c = 0.0;
    std::vector<int> zero_weight_atoms;  // nonzero effect on a zero-weight atom
};

// Smallest certificate c with ||F({x})|| <= c mu({x}) per atom; by additivity
// this certifies ||F(event)|| <= c mu(event) for every event.
AbsoluteContinuity absolute_continuity_constant(const DiscretePOVM& povm, const Tolerances& tol = {});

}  // namespace povmkit
