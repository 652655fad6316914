#include "povmkit/operators.hpp"

#include <algorithm>
#include <cmath>

namespace povmkit {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> solve_hermitian(const Matrix& m, bool vectors) {
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.compute(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigensolve failed to converge");
    return es;
}

}  // namespace

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double hermitian_max_eig(const Matrix& m) {
    return solve_hermitian(m, false).eigenvalues().maxCoeff();
}

double hermitian_min_eig(const Matrix& m) {
    return solve_hermitian(m, false).eigenvalues().minCoeff();
}

double hermitian_operator_norm(const Matrix& m) {
    const auto evs = solve_hermitian(m, false).eigenvalues();
    return std::max(std::abs(evs.minCoeff()), std::abs(evs.maxCoeff()));
}

double operator_norm(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    // Largest singular value via the Gram matrix; accurate in a relative
    // sense because || m^+ m || scales with the answer squared.
    const Matrix gram = m.adjoint() * m;
    const double top = solve_hermitian(gram, false).eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

double min_eigenvalue(const Matrix& m, const Tolerances& tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("min_eigenvalue: matrix not square");
    if (hermiticity_defect(m) > tol.hermiticity)
        throw std::invalid_argument("min_eigenvalue: operator is not Hermitian within tolerance");
    const Matrix h = 0.5 * (m + m.adjoint());
    return hermitian_min_eig(h);
}

Vector canonical_phase(Vector v, double zero_tol) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > zero_tol) {
            v *= std::conj(v[i]) / a;
            return v;
        }
    }
    return v;
}

Effect Effect::zero(int dim) {
    if (dim < 1) throw std::invalid_argument("Effect::zero: dim must be >= 1");
    Effect e;
    e.rep_ = Matrix(Matrix::Zero(dim, dim));
    e.dim_ = dim;
    return e;
}

Effect Effect::from_matrix(Matrix m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument("Effect: matrix must be square and nonempty");
    const double defect = hermiticity_defect(m);
    if (defect > tol.hermiticity)
        throw std::invalid_argument("Effect: operator is not Hermitian within tolerance");
    Effect e;
    e.dim_ = static_cast<int>(m.rows());
    e.herm_defect_ = defect;
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    e.min_eig_ = es.eigenvalues().minCoeff();
    e.max_eig_ = es.eigenvalues().maxCoeff();
    e.rep_ = std::move(m);
    return e;
}

Effect Effect::rank_one(double weight, Vector v) {
    if (v.size() == 0) throw std::invalid_argument("Effect::rank_one: empty vector");
    Effect e;
    e.dim_ = static_cast<int>(v.size());
    const double n2 = v.squaredNorm();
    const double lam = weight * n2;
    if (e.dim_ > 1) {
        e.min_eig_ = std::min(0.0, lam);
        e.max_eig_ = std::max(0.0, lam);
    } else {
        e.min_eig_ = e.max_eig_ = lam;
    }
    e.rep_ = RankOne{weight, std::move(v), n2};
    return e;
}

double Effect::weight() const {
    return std::get<RankOne>(rep_).weight;
}

const Vector& Effect::vector() const {
    return std::get<RankOne>(rep_).v;
}

Matrix Effect::to_dense() const {
    if (const auto* r = std::get_if<RankOne>(&rep_)) {
        Matrix m(dim_, dim_);
        m.noalias() = (r->weight * r->v) * r->v.adjoint();
        return m;
    }
    return std::get<Matrix>(rep_);
}

void Effect::add_dense_into(Matrix& acc) const {
    if (const auto* r = std::get_if<RankOne>(&rep_)) {
        acc.noalias() += (r->weight * r->v) * r->v.adjoint();
    } else {
        acc += std::get<Matrix>(rep_);
    }
}

void Effect::write_dense_into(Matrix& out) const {
    if (const auto* r = std::get_if<RankOne>(&rep_)) {
        out.resize(dim_, dim_);
        out.noalias() = (r->weight * r->v) * r->v.adjoint();
    } else {
        out = std::get<Matrix>(rep_);
    }
}

double Effect::quadratic_form(const Vector& psi) const {
    if (psi.size() != dim_) throw std::invalid_argument("Effect::quadratic_form: dimension mismatch");
    if (const auto* r = std::get_if<RankOne>(&rep_)) {
        return r->weight * std::norm(r->v.dot(psi));
    }
    const Complex q = psi.dot(std::get<Matrix>(rep_) * psi);
    return q.real();
}

double spectral_norm(const Effect& e) {
    return e.max_eig();
}

std::pair<StateVector, double> maximizing_state(const Effect& e, const Tolerances& tol) {
    if (std::max(std::abs(e.min_eig()), std::abs(e.max_eig())) <= tol.zero)
        throw std::domain_error("maximizing_state: zero operator has no maximizer");

    Vector psi;
    if (e.rank_one_form() && e.weight() > 0.0) {
        psi = canonical_phase(e.vector().normalized(), tol.zero);
    } else {
        const Matrix h = 0.5 * (e.to_dense() + e.to_dense().adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::ComputeEigenvectors);
        const auto& evs = es.eigenvalues();
        const double top = evs.maxCoeff();
        // Columns spanning the top eigenspace (within the equality tolerance).
        std::vector<Eigen::Index> cols;
        for (Eigen::Index i = 0; i < evs.size(); ++i)
            if (evs[i] >= top - tol.equality) cols.push_back(i);
        Matrix basis(e.dim(), static_cast<Eigen::Index>(cols.size()));
        for (size_t k = 0; k < cols.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(cols[k]);
        // First standard basis vector with a nonvanishing projection; its
        // normalized projection is the unique in-subspace maximizer of that
        // component's magnitude, so the choice is reproducible.
        psi = Vector();
        for (int j = 0; j < e.dim(); ++j) {
            Vector proj = basis * (basis.adjoint().col(j));
            if (proj.norm() > tol.zero) {
                psi = canonical_phase(proj.normalized(), tol.zero);
                break;
            }
        }
        if (psi.size() == 0) psi = canonical_phase(es.eigenvectors().col(evs.size() - 1), tol.zero);
    }

    StateVector state(psi);
    const double value = e.quadratic_form(state.amplitudes());
    return {std::move(state), value};
}

double rank_one_commutator_norm(double c1, const Vector& u, double c2, const Vector& w) {
    const double nu2 = u.squaredNorm();
    const double nw2 = w.squaredNorm();
    if (nu2 <= 0.0 || nw2 <= 0.0) return 0.0;
    const Vector uh = u / std::sqrt(nu2);
    const Vector wh = w / std::sqrt(nw2);
    const Complex s = uh.dot(wh);
    // sqrt(1 - |s|^2) as an explicit residual norm; exact cancellation-free.
    const Vector r = wh - s * uh;
    return std::abs(c1) * std::abs(c2) * nu2 * nw2 * std::abs(s) * r.norm();
}

double rank_one_diff_norm(double c1, const Vector& u, double c2, const Vector& w) {
    const double nu2 = u.squaredNorm();
    const double nw2 = w.squaredNorm();
    if (nu2 <= 0.0 && nw2 <= 0.0) return 0.0;
    if (nu2 <= 0.0) return std::abs(c2) * nw2;
    if (nw2 <= 0.0) return std::abs(c1) * nu2;

    const double nu = std::sqrt(nu2);
    const Vector e1 = u / nu;
    const Complex b1 = e1.dot(w);
    const Vector r = w - b1 * e1;
    const double b2 = r.norm();

    // Restrict c1 u u^+ - c2 w w^+ to span{e1, r/||r||}:
    //   [ c1 nu^2 - c2 |b1|^2   -c2 b1 conj(b2) ]
    //   [ -c2 conj(b1) b2       -c2 b2^2        ]
    const double a11 = c1 * nu2 - c2 * std::norm(b1);
    const double a22 = -c2 * b2 * b2;
    const double off2 = std::norm(c2 * b1 * b2);
    const double tr = a11 + a22;
    const double det = a11 * a22 - off2;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double lo = 0.5 * (tr - disc);
    const double hi = 0.5 * (tr + disc);
    return std::max(std::abs(lo), std::abs(hi));
}

double commutator_norm(const Effect& a, const Effect& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("commutator_norm: dimension mismatch");
    if (a.rank_one_form() && b.rank_one_form())
        return rank_one_commutator_norm(a.weight(), a.vector(), b.weight(), b.vector());
    const Matrix am = a.to_dense();
    const Matrix bm = b.to_dense();
    return operator_norm(am * bm - bm * am);
}

}  // namespace povmkit
