#include "povmkit/covariant.hpp"

#include <cmath>
#include <numbers>

namespace povmkit {

namespace {

constexpr double kPi = std::numbers::pi;

int mod(int a, int d) {
    const int r = a % d;
    return r < 0 ? r + d : r;
}

}  // namespace

WeylSystem::WeylSystem(int d) : d_(d) {
    if (d < 2) throw std::invalid_argument("WeylSystem: d must be >= 2");
    omega_.resize(static_cast<size_t>(d));
    for (int m = 0; m < d; ++m)
        omega_[static_cast<size_t>(m)] = std::polar(1.0, 2.0 * kPi * m / d);
    x_ = Matrix::Zero(d, d);
    z_ = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        x_(mod(j + 1, d), j) = Complex(1.0, 0.0);
        z_(j, j) = omega_[static_cast<size_t>(j)];
    }
}

Complex WeylSystem::root_of_unity(int64_t power) const {
    int64_t m = power % d_;
    if (m < 0) m += d_;
    return omega_[static_cast<size_t>(m)];
}

Matrix WeylSystem::displacement(int q, int p) const {
    Matrix m = Matrix::Zero(d_, d_);
    for (int j = 0; j < d_; ++j)
        m(mod(j + q, d_), j) = root_of_unity(static_cast<int64_t>(p) * j);
    return m;
}

Vector WeylSystem::displace(int q, int p, const Vector& v) const {
    if (v.size() != d_) throw std::invalid_argument("WeylSystem::displace: dimension mismatch");
    Vector out(d_);
    for (int j = 0; j < d_; ++j) {
        const int src = mod(j - q, d_);
        out[j] = root_of_unity(static_cast<int64_t>(p) * src) * v[src];
    }
    return out;
}

FiducialVector FiducialVector::basis(int dim, int index) {
    return {Label::Basis, index, 1.0, StateVector::basis(dim, index)};
}

FiducialVector FiducialVector::uniform(int dim) {
    Vector v = Vector::Constant(dim, Complex(1.0, 0.0));
    return {Label::Uniform, 0, 1.0, StateVector(std::move(v))};
}

FiducialVector FiducialVector::gaussian_lattice(int dim, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_lattice: width must be positive");
    Vector v(dim);
    for (int j = 0; j < dim; ++j) {
        const double dist = std::min(j, dim - j);
        v[j] = Complex(std::exp(-dist * dist / (4.0 * width * width)), 0.0);
    }
    return {Label::Gaussian, 0, width, StateVector(std::move(v))};
}

FiducialVector FiducialVector::gaussian_fock(int fock_dim, double width) {
    if (width < 0.25 || width > 4.0)
        throw std::invalid_argument("gaussian_fock: width outside [0.25, 4] would outrun the truncation");
    if (fock_dim < 2) throw std::invalid_argument("gaussian_fock: fock_dim must be >= 2");
    // Squeezed vacuum: c_{2k} = sech(r)^{1/2} (-tanh r)^k sqrt((2k)!)/(2^k k!).
    const double r = -std::log(width);
    const double th = std::tanh(r);
    Vector v = Vector::Zero(fock_dim);
    double c = 1.0 / std::sqrt(std::cosh(r));
    v[0] = Complex(c, 0.0);
    for (int k = 1; 2 * k < fock_dim; ++k) {
        c *= -th * std::sqrt((2.0 * k) * (2.0 * k - 1.0)) / (2.0 * k);
        v[2 * k] = Complex(c, 0.0);
    }
    return {Label::Gaussian, 0, width, StateVector(std::move(v))};
}

FiducialVector FiducialVector::custom(StateVector v) {
    return {Label::Custom, 0, 1.0, std::move(v)};
}

std::string FiducialVector::label_name() const {
    switch (label) {
        case Label::Basis: return "basis";
        case Label::Uniform: return "uniform";
        case Label::Gaussian: return "gaussian";
        case Label::Custom: return "custom";
    }
    throw std::logic_error("unreachable fiducial label");
}

CoherentGrid CoherentGrid::make(int fock_dim, double half_width, double cell_size) {
    if (fock_dim < 2) throw std::invalid_argument("CoherentGrid: fock_dim must be >= 2");
    if (!(half_width > 0.0)) throw std::invalid_argument("CoherentGrid: half_width must be positive");
    if (!(cell_size > 0.0 && cell_size <= half_width))
        throw std::invalid_argument("CoherentGrid: need 0 < cell_size <= half_width");
    const double ratio = 2.0 * half_width / cell_size;
    const int n = static_cast<int>(std::lround(ratio));
    if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("CoherentGrid: 2*half_width must be an integer multiple of cell_size");
    return {fock_dim, half_width, cell_size, n};
}

DiscretePOVM build_wh_povm(const WeylSystem& sys, const FiducialVector& eta, const Tolerances& tol,
                           std::optional<double> defect_threshold) {
    const int d = sys.dim();
    if (eta.state.dim() != d)
        throw std::invalid_argument("build_wh_povm: fiducial dimension does not match the system");
    const double w = 1.0 / d;
    std::vector<Effect> effects;
    effects.reserve(static_cast<size_t>(d) * d);
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p)
            effects.push_back(Effect::rank_one(w, sys.displace(q, p, eta.state.amplitudes())));
    return DiscretePOVM::admit(OutcomeSpace::lattice(d), d, std::move(effects),
                               defect_threshold.value_or(tol.norm_exact), tol);
}

// <m|D(alpha)|n> = e^{-t/2} sqrt(n!/m!) alpha^{m-n} L_n^{(m-n)}(t) for m >= n
// with t = |alpha|^2; the upper entries follow from D(alpha)^+ = D(-alpha).
Matrix truncated_displacement_block(int fock_dim, Complex alpha) {
    const double t = std::norm(alpha);
    const double damp = std::exp(-0.5 * t);
    Matrix d(fock_dim, fock_dim);
    Complex alpha_pow(1.0, 0.0);                  // alpha^a
    Complex nega_pow(1.0, 0.0);                   // (-conj(alpha))^a
    double ratio0 = 1.0;                          // sqrt(0!/a!)
    for (int a = 0; a < fock_dim; ++a) {
        if (a > 0) {
            alpha_pow *= alpha;
            nega_pow *= -std::conj(alpha);
            ratio0 /= std::sqrt(static_cast<double>(a));
        }
        // Laguerre values L_n^{(a)}(t) by the three-term recurrence in n;
        // ratio_n = sqrt(n!/(n+a)!).
        double lprev = 0.0;
        double l = 1.0;
        double ratio = ratio0;
        for (int n = 0; n + a < fock_dim; ++n) {
            if (n == 1) {
                lprev = l;
                l = 1.0 + a - t;
            } else if (n > 1) {
                const double lnext = ((2.0 * n - 1.0 + a - t) * l - (n - 1.0 + a) * lprev) / n;
                lprev = l;
                l = lnext;
            }
            if (n > 0) ratio *= std::sqrt(n / (n + static_cast<double>(a)));
            const int m = n + a;
            d(m, n) = damp * ratio * alpha_pow * l;
            if (a > 0) d(n, m) = damp * ratio * nega_pow * l;
        }
    }
    return d;
}

namespace {

std::string coherent_suggestion(const CoherentGrid& grid, double threshold) {
    // Fock tail heuristic: the diagonal deficiency at level N-1 over a disk of
    // radius L is the lower Poisson tail P[Poisson(L^2) <= N-1].
    const int n = grid.fock_dim;
    auto tail = [n](double lam) {
        double term = std::exp(-lam);
        double sum = term;
        for (int k = 1; k < n; ++k) {
            term *= lam / k;
            sum += term;
        }
        return sum;
    };
    double l = grid.half_width;
    while (l < 64.0 && tail(l * l) > 0.5 * threshold) l += 0.5;
    return "increase half_width to about " + std::to_string(l) +
           " (or lower fock_dim) so the grid covers the occupied Fock levels";
}

}  // namespace

DiscretePOVM build_coherent_povm(const CoherentGrid& grid, const FiducialVector& eta,
                                 const Tolerances& tol, std::optional<double> defect_threshold) {
    if (eta.state.dim() != grid.fock_dim)
        throw std::invalid_argument("build_coherent_povm: fiducial must live on the Fock truncation");
    OutcomeSpace space = OutcomeSpace::phase_grid(grid.cells_per_side, grid.half_width, grid.cell_size);
    const double w = grid.cell_size * grid.cell_size / kPi;

    std::vector<Effect> effects;
    effects.reserve(static_cast<size_t>(space.size()));
    for (int i = 0; i < space.size(); ++i) {
        const auto& a = space.atom(i);
        const Complex alpha(a.coord[0], a.coord[1]);
        Vector v = truncated_displacement_block(grid.fock_dim, alpha) * eta.state.amplitudes();
        effects.push_back(Effect::rank_one(w, std::move(v)));
    }
    const double threshold = defect_threshold.value_or(tol.norm_coherent);
    return DiscretePOVM::admit(std::move(space), grid.fock_dim, std::move(effects), threshold, tol,
                               coherent_suggestion(grid, threshold));
}

std::vector<DiscretePOVM> build_coherent_family(const CoherentGrid& coarsest, const FiducialVector& eta,
                                                int levels, const Tolerances& tol,
                                                std::optional<double> defect_threshold) {
    if (levels < 1) throw std::invalid_argument("build_coherent_family: need at least one level");
    std::vector<DiscretePOVM> out;
    out.reserve(static_cast<size_t>(levels));
    double h = coarsest.cell_size;
    for (int k = 0; k < levels; ++k) {
        out.push_back(build_coherent_povm(CoherentGrid::make(coarsest.fock_dim, coarsest.half_width, h),
                                          eta, tol, defect_threshold));
        h *= 0.5;
    }
    return out;
}

double covariance_check(const DiscretePOVM& povm, const WeylSystem& sys, int shift_q, int shift_p) {
    const int d = sys.dim();
    if (povm.dim() != d || povm.space().kind() != SpaceKind::WhLattice || povm.space().rows() != d)
        throw std::invalid_argument("covariance_check: observable was not built on this system");
    double worst = 0.0;
    for (int q = 0; q < d; ++q) {
        for (int p = 0; p < d; ++p) {
            const Effect& src = povm.atom_effect(q * d + p);
            const Effect& dst = povm.atom_effect(mod(q + shift_q, d) * d + mod(p + shift_p, d));
            const Vector moved = sys.displace(shift_q, shift_p, src.vector());
            worst = std::max(worst, rank_one_diff_norm(src.weight(), moved, dst.weight(), dst.vector()));
        }
    }
    return worst;
}

AbsoluteContinuity absolute_continuity_constant(const DiscretePOVM& povm, const Tolerances& tol) {
    AbsoluteContinuity out;
    for (int i = 0; i < povm.atom_count(); ++i) {
        const double norm = spectral_norm(povm.atom_effect(i));
        const double w = povm.space().atom(i).weight;
        if (w <= 0.0) {
            if (norm > tol.zero) {
                out.finite = false;
                out.zero_weight_atoms.push_back(i);
            }
            continue;
        }
        out.c = std::max(out.c, norm / w);
    }
    return out;
}

}  // namespace povmkit
