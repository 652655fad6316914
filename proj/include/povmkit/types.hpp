#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>

namespace povmkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

// Finite-dimensional complex Hilbert space, identified by its dimension.
class HilbertSpace {
public:
    explicit HilbertSpace(int dim) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("HilbertSpace: dim must be >= 1");
    }
    int dim() const { return dim_; }

private:
    int dim_;
};

// Unit vector; normalized once at construction.
class StateVector {
public:
    explicit StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
        if (v_.size() == 0) throw std::invalid_argument("StateVector: empty amplitude vector");
        const double n = v_.norm();
        if (!(n > 1e-150)) throw std::invalid_argument("StateVector: cannot normalize a zero vector");
        v_ /= n;
    }

    static StateVector basis(int dim, int index) {
        if (index < 0 || index >= dim) throw std::invalid_argument("StateVector::basis: index out of range");
        Vector v = Vector::Zero(dim);
        v[index] = Complex(1.0, 0.0);
        return StateVector(std::move(v));
    }

    const Vector& amplitudes() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }

private:
    Vector v_;
};

}  // namespace povmkit
