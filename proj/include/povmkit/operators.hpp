#pragma once

#include <utility>
#include <variant>

#include "povmkit/tolerances.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Dense helpers. Matrices passed to the hermitian_* functions are assumed
// Hermitian up to roundoff; callers validate first where it matters.
double hermiticity_defect(const Matrix& m);       // max entry of |m - m^+|
double hermitian_max_eig(const Matrix& m);
double hermitian_min_eig(const Matrix& m);
double hermitian_operator_norm(const Matrix& m);  // max |eigenvalue|
double operator_norm(const Matrix& m);            // largest singular value

// Smallest eigenvalue of a Hermitian operator; rejects non-Hermitian input.
double min_eigenvalue(const Matrix& m, const Tolerances& tol = {});

// Fixes the global phase so the first component with |v_i| > zero_tol is real
// and positive. Used to make eigenvector-valued results reproducible.
Vector canonical_phase(Vector v, double zero_tol);

// Hermitian operator with its eigenvalue range recorded at construction.
// Hermiticity is enforced (never silently symmetrized); the effect bounds
// 0 <= E <= 1 are recorded, not enforced, so that validation layers can
// report violations instead of refusing to look at them.
//
// Rank-one operators weight * |v><v| keep the factored form; norms, ranges
// and quadratic forms are computed without densifying. The vector may be
// subnormalized (||v|| <= 1), as produced by truncated constructions.
class Effect {
public:
    static Effect zero(int dim);
    static Effect from_matrix(Matrix m, const Tolerances& tol = {});
    static Effect rank_one(double weight, Vector v);

    int dim() const { return dim_; }
    bool rank_one_form() const { return std::holds_alternative<RankOne>(rep_); }
    double weight() const;        // rank-one form only
    const Vector& vector() const; // rank-one form only

    Matrix to_dense() const;
    void add_dense_into(Matrix& acc) const;    // acc += dense form
    void write_dense_into(Matrix& out) const;  // out = dense form (resizes)
    double quadratic_form(const Vector& psi) const;  // Re <psi|E|psi>

    double hermiticity_value() const { return herm_defect_; }
    double min_eig() const { return min_eig_; }
    double max_eig() const { return max_eig_; }

private:
    struct RankOne {
        double weight;
        Vector v;
        double vnorm2;
    };

    Effect() = default;

    std::variant<Matrix, RankOne> rep_;
    int dim_ = 0;
    double herm_defect_ = 0.0;
    double min_eig_ = 0.0;
    double max_eig_ = 0.0;
};

// Largest eigenvalue of the Hermitian part; for genuine effects this equals
// sup over unit psi of <psi|E|psi>.
double spectral_norm(const Effect& e);

// Unit vector attaining the spectral norm, with a deterministic tie-break on
// degenerate top eigenspaces: project standard basis vectors onto the top
// eigenspace and take the first with nonvanishing projection, phase-fixed.
std::pair<StateVector, double> maximizing_state(const Effect& e, const Tolerances& tol = {});

// Operator norm of AB - BA.
double commutator_norm(const Effect& a, const Effect& b);

// || c1 u u^+ - c2 w w^+ ||, computed in the 2-dimensional span. Stable down
// to roundoff scale when u and w agree up to a phase, unlike formulas that
// take sqrt(1 - |<u,w>|^2) of a rounded inner product.
double rank_one_diff_norm(double c1, const Vector& u, double c2, const Vector& w);

// || [c1 u u^+, c2 w w^+] || = c1 c2 ||u||^2 ||w||^2 |s| sqrt(1-|s|^2) with
// s the normalized overlap; the sqrt factor is evaluated as the norm of an
// explicit residual vector so that near-parallel pairs report ~eps, not ~sqrt(eps).
double rank_one_commutator_norm(double c1, const Vector& u, double c2, const Vector& w);

}  // namespace povmkit
