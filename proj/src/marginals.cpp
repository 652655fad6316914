#include "povmkit/marginals.hpp"

#include <cmath>
#include <numbers>

namespace povmkit {

namespace {

Matrix tree_sum_selected(const DiscretePOVM& povm, const std::vector<int>& atoms, size_t lo, size_t hi) {
    if (hi - lo == 1) return povm.atom_effect(atoms[lo]).to_dense();
    const size_t mid = lo + (hi - lo) / 2;
    return tree_sum_selected(povm, atoms, lo, mid) + tree_sum_selected(povm, atoms, mid, hi);
}

DiscretePOVM project_out(const DiscretePOVM& joint, bool keep_rows, const Tolerances& tol) {
    const OutcomeSpace& space = joint.space();
    if (!space.is_product())
        throw std::invalid_argument("marginal: outcome space is not a product grid");
    const int rows = space.rows();
    const int cols = space.cols();
    const int kept = keep_rows ? rows : cols;
    const int summed = keep_rows ? cols : rows;

    std::vector<Effect> effects;
    std::vector<double> coords, weights;
    effects.reserve(static_cast<size_t>(kept));
    for (int a = 0; a < kept; ++a) {
        std::vector<int> line(static_cast<size_t>(summed));
        for (int b = 0; b < summed; ++b)
            line[static_cast<size_t>(b)] = keep_rows ? a * cols + b : b * cols + a;
        effects.push_back(Effect::from_matrix(tree_sum_selected(joint, line, 0, line.size()), tol));
        const auto& first = space.atom(line.front());
        coords.push_back(keep_rows ? first.coord[0] : first.coord[1]);
        weights.push_back(space.weight_sum(line));
    }

    MeasureSpec measure;
    measure.kind = space.measure().kind;
    measure.infinite_ambient = space.measure().infinite_ambient;
    measure.total = tree_sum(weights);
    OutcomeSpace line_space = OutcomeSpace::line(std::move(coords), std::move(weights), measure);
    // Same atoms regrouped, so the parent's admissibility threshold carries over.
    return DiscretePOVM::admit(std::move(line_space), joint.dim(), std::move(effects),
                               std::max(joint.defect_threshold(), joint.normalization_defect() + 1e-12), tol);
}

}  // namespace

MarkovKernel::MarkovKernel(RealMatrix entries, double row_tol) : m_(std::move(entries)) {
    if (m_.rows() == 0 || m_.cols() == 0) throw std::invalid_argument("MarkovKernel: empty table");
    for (Eigen::Index x = 0; x < m_.rows(); ++x) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < m_.cols(); ++j) {
            const double v = m_(x, j);
            if (v < -row_tol || v > 1.0 + row_tol)
                throw std::invalid_argument("MarkovKernel: entry outside [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > row_tol)
            throw std::invalid_argument("MarkovKernel: row " + std::to_string(x) + " sums to " +
                                        std::to_string(sum) + ", not 1");
    }
}

MarkovKernel MarkovKernel::identity(int n) {
    return MarkovKernel(RealMatrix::Identity(n, n));
}

MarkovKernel MarkovKernel::uniform(int rows, int cols) {
    return MarkovKernel(RealMatrix::Constant(rows, cols, 1.0 / cols));
}

double MarkovKernel::event_weight(int x, const EventSet& event) const {
    std::vector<double> terms;
    terms.reserve(event.indices().size());
    for (int j : event.indices()) {
        if (j >= cols()) throw std::invalid_argument("MarkovKernel::event_weight: atom out of range");
        terms.push_back(m_(x, j));
    }
    return tree_sum(terms);
}

double MarkovKernel::max_row_sum_deviation() const {
    double worst = 0.0;
    for (Eigen::Index x = 0; x < m_.rows(); ++x)
        worst = std::max(worst, std::abs(m_.row(x).sum() - 1.0));
    return worst;
}

DiscretePOVM marginal_q(const DiscretePOVM& joint, const Tolerances& tol) {
    return project_out(joint, true, tol);
}

DiscretePOVM marginal_p(const DiscretePOVM& joint, const Tolerances& tol) {
    return project_out(joint, false, tol);
}

SmearedObservable smear_pvm(const DiscretePOVM& base_pvm, const MarkovKernel& kernel,
                            const Tolerances& tol, std::string base_basis) {
    const auto proj = is_projective(base_pvm, tol.equality);
    if (!proj.projective)
        throw std::invalid_argument("smear_pvm: base observable is not projective (violation " +
                                    std::to_string(proj.worst_violation) + ")");
    if (kernel.rows() != base_pvm.atom_count())
        throw std::invalid_argument("smear_pvm: kernel rows must index the base spectral points");

    const int d = base_pvm.dim();
    const int m = kernel.cols();
    std::vector<Effect> effects;
    effects.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        Matrix acc = Matrix::Zero(d, d);
        // omega[x][j] P_x accumulated in ascending x; the base projectors are
        // orthogonal so no summation-order subtlety arises here.
        for (int x = 0; x < base_pvm.atom_count(); ++x) {
            const Effect& px = base_pvm.atom_effect(x);
            if (px.rank_one_form()) {
                acc.noalias() += (kernel(x, j) * px.weight() * px.vector()) * px.vector().adjoint();
            } else {
                acc += kernel(x, j) * px.to_dense();
            }
        }
        effects.push_back(Effect::from_matrix(std::move(acc), tol));
    }

    std::vector<double> coords(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) coords[static_cast<size_t>(j)] = j;
    OutcomeSpace space = OutcomeSpace::line(std::move(coords), std::vector<double>(static_cast<size_t>(m), 1.0),
                                            {MeasureKind::CountingNormalized, static_cast<double>(m), false});
    // Row-stochasticity gives || sum F_j - 1 || <= base defect + worst row deviation.
    const double threshold = std::max(tol.norm_exact, base_pvm.normalization_defect() +
                                                          kernel.max_row_sum_deviation() + 1e-12);
    DiscretePOVM povm = DiscretePOVM::admit(std::move(space), d, std::move(effects), threshold, tol);
    return {std::move(base_basis), kernel, std::move(povm)};
}

KernelExtraction extract_kernel(const DiscretePOVM& povm, const Matrix& basis, const Tolerances& tol) {
    if (basis.rows() != povm.dim() || basis.cols() != povm.dim())
        throw std::invalid_argument("extract_kernel: basis must be dim x dim");
    KernelExtraction out;
    const int d = povm.dim();
    const int m = povm.atom_count();
    out.entries = RealMatrix::Zero(d, m);
    out.diagonal = true;
    for (int j = 0; j < m; ++j) {
        const Matrix e = basis.adjoint() * povm.atom_effect(j).to_dense() * basis;
        double off = 0.0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (r != c) off = std::max(off, std::abs(e(r, c)));
        if (off > out.worst_offdiag) {
            out.worst_offdiag = off;
            out.offending_atom = j;
        }
        if (off > tol.equality) out.diagonal = false;
        for (int r = 0; r < d; ++r) out.entries(r, j) = e(r, r).real();
    }
    if (!out.diagonal) {
        out.ok = false;
        return out;
    }
    for (int r = 0; r < d; ++r)
        out.worst_row_dev = std::max(out.worst_row_dev, std::abs(out.entries.row(r).sum() - 1.0));
    out.row_stochastic = out.worst_row_dev <= tol.kernel_row;
    out.ok = out.row_stochastic;
    return out;
}

Matrix computational_basis(int d) {
    return Matrix::Identity(d, d);
}

Matrix fourier_basis(int d) {
    Matrix f(d, d);
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            f(j, k) = std::polar(s, 2.0 * std::numbers::pi * j * k / d);
    return f;
}

MarkovKernel wh_position_kernel(int d, const FiducialVector& eta, double row_tol) {
    if (eta.state.dim() != d) throw std::invalid_argument("wh_position_kernel: dimension mismatch");
    RealMatrix k(d, d);
    const Vector& v = eta.state.amplitudes();
    for (int x = 0; x < d; ++x)
        for (int q = 0; q < d; ++q)
            k(x, q) = std::norm(v[(x - q + d) % d]);
    return MarkovKernel(std::move(k), row_tol);
}

KernelIdentityDeviation marginal_kernel_identity_deviation(int d, const FiducialVector& eta,
                                                           const Tolerances& tol) {
    const WeylSystem sys(d);
    const DiscretePOVM joint = build_wh_povm(sys, eta, tol);
    const DiscretePOVM lhs = marginal_q(joint, tol);

    const DiscretePOVM base = make_sharp_position_pvm(d, tol);
    const SmearedObservable rhs = smear_pvm(base, wh_position_kernel(d, eta), tol);

    KernelIdentityDeviation dev;
    for (int q = 0; q < d; ++q) {
        const Matrix delta = lhs.atom_effect(q).to_dense() - rhs.povm.atom_effect(q).to_dense();
        dev.entrywise = std::max(dev.entrywise, delta.cwiseAbs().maxCoeff());
        dev.spectral = std::max(dev.spectral, hermitian_operator_norm(delta));
    }
    return dev;
}

double marginal_kernel_identity_check(int d, const FiducialVector& eta, const Tolerances& tol) {
    return marginal_kernel_identity_deviation(d, eta, tol).entrywise;
}

}  // namespace povmkit
