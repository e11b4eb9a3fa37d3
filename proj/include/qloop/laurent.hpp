#ifndef QLOOP_LAURENT_HPP
#define QLOOP_LAURENT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qloop/qparams.hpp"

namespace qloop {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatC = Mat<Cx>;
using VecC = Vec<Cx>;

// Laurent polynomial in the spectral variable zeta with coefficients of
// scalar type S, stored densely over a degree window [lo, hi].
template <class S = Cx>
class LaurentPoly {
  public:
    LaurentPoly() = default;
    LaurentPoly(int lo, std::vector<S> coeffs) : lo_(lo), c_(std::move(coeffs)) { normalize(); }

    static LaurentPoly zero() { return LaurentPoly(); }
    static LaurentPoly constant(S v) { return LaurentPoly(0, {v}); }
    static LaurentPoly monomial(S v, int k) { return LaurentPoly(k, {v}); }

    bool is_zero() const { return c_.empty(); }
    int lo() const { return lo_; }
    int hi() const { return lo_ + int(c_.size()) - 1; }
    const std::vector<S>& coeffs() const { return c_; }

    S coeff(int k) const {
        if (k < lo() || c_.empty() || k > hi()) return S(0);
        return c_[size_t(k - lo_)];
    }

    void set_coeff(int k, S v) {
        if (c_.empty()) {
            lo_ = k;
            c_.assign(1, v);
            return;
        }
        if (k < lo_) {
            c_.insert(c_.begin(), size_t(lo_ - k), S(0));
            lo_ = k;
        } else if (k > hi()) {
            c_.resize(size_t(k - lo_ + 1), S(0));
        }
        c_[size_t(k - lo_)] = v;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    // Drop coefficients below rel_tol * max|coeff| and trim the window.
    void prune(double rel_tol = 1e-14) {
        const double thr = rel_tol * max_abs();
        for (auto& v : c_)
            if (std::abs(v) <= thr) v = S(0);
        normalize();
    }

    S eval(S zeta) const {
        if (c_.empty()) return S(0);
        // Horner on the polynomial part, then the overall zeta^{lo}.
        S acc = S(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * zeta + *it;
        return acc * std::pow(zeta, S(double(lo_)));
    }

    LaurentPoly& operator+=(const LaurentPoly& o) {
        for (int k = o.lo(); k <= o.hi(); ++k) set_coeff(k, coeff(k) + o.coeff(k));
        normalize();
        return *this;
    }
    LaurentPoly& operator-=(const LaurentPoly& o) {
        for (int k = o.lo(); k <= o.hi(); ++k) set_coeff(k, coeff(k) - o.coeff(k));
        normalize();
        return *this;
    }
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.is_zero() || b.is_zero()) return LaurentPoly();
        std::vector<S> c(a.c_.size() + b.c_.size() - 1, S(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return LaurentPoly(a.lo_ + b.lo_, std::move(c));
    }
    friend LaurentPoly operator*(S s, LaurentPoly a) {
        for (auto& v : a.c_) v *= s;
        a.normalize();
        return a;
    }

    // Substitution zeta -> c*zeta: multiplies the exponent-k coefficient by c^k.
    LaurentPoly shifted(S c) const {
        LaurentPoly r = *this;
        for (int k = lo(); k <= hi(); ++k) r.c_[size_t(k - lo_)] *= std::pow(c, S(double(k)));
        return r;
    }

  private:
    void normalize() {
        size_t a = 0, b = c_.size();
        while (a < b && c_[a] == S(0)) ++a;
        while (b > a && c_[b - 1] == S(0)) --b;
        if (a == b) {
            c_.clear();
            lo_ = 0;
            return;
        }
        if (a > 0 || b < c_.size()) {
            c_ = std::vector<S>(c_.begin() + long(a), c_.begin() + long(b));
            lo_ += int(a);
        }
    }

    int lo_ = 0;
    std::vector<S> c_;  // empty means the zero polynomial
};

// Square matrix whose entries are Laurent polynomials in zeta, stored as one
// dense coefficient matrix per exponent over a common window.  This is the
// carrier for every represented integrability object on a chain.
template <class S = Cx>
class LaurentOp {
  public:
    LaurentOp() = default;
    explicit LaurentOp(Eigen::Index dim) : dim_(dim) {}
    LaurentOp(int lo, std::vector<Mat<S>> coeffs) : lo_(lo), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("LaurentOp: empty coefficient list");
        dim_ = coeffs_.front().rows();
        for (const auto& m : coeffs_)
            if (m.rows() != dim_ || m.cols() != dim_)
                throw std::invalid_argument("LaurentOp: coefficient dimension mismatch");
        trim();
    }

    static LaurentOp identity(Eigen::Index dim) {
        return LaurentOp(0, {Mat<S>::Identity(dim, dim)});
    }
    static LaurentOp from_matrix(Mat<S> m, int k = 0) {
        if (m.rows() != m.cols()) throw std::invalid_argument("LaurentOp: matrix must be square");
        return LaurentOp(k, {std::move(m)});
    }
    static LaurentOp zero(Eigen::Index dim) { return LaurentOp(dim); }

    Eigen::Index dim() const { return dim_; }
    bool is_zero() const { return coeffs_.empty(); }
    int lo() const { return lo_; }
    int hi() const { return lo_ + int(coeffs_.size()) - 1; }
    int n_coeffs() const { return int(coeffs_.size()); }

    const Mat<S>& coeff_ref(int k) const {
        static const Mat<S> dummy;
        if (coeffs_.empty() || k < lo_ || k > hi()) return dummy;  // caller guards dims
        return coeffs_[size_t(k - lo_)];
    }
    Mat<S> coeff(int k) const {
        if (coeffs_.empty() || k < lo_ || k > hi()) return Mat<S>::Zero(dim_, dim_);
        return coeffs_[size_t(k - lo_)];
    }
    void set_coeff(int k, Mat<S> m) {
        if (m.rows() != dim_ || m.cols() != dim_)
            throw std::invalid_argument("LaurentOp::set_coeff: dimension mismatch");
        if (coeffs_.empty()) {
            lo_ = k;
            coeffs_.push_back(std::move(m));
            return;
        }
        if (k < lo_) {
            coeffs_.insert(coeffs_.begin(), size_t(lo_ - k), Mat<S>::Zero(dim_, dim_));
            lo_ = k;
        } else if (k > hi()) {
            coeffs_.resize(size_t(k - lo_ + 1), Mat<S>::Zero(dim_, dim_));
        }
        coeffs_[size_t(k - lo_)] = std::move(m);
    }

    LaurentPoly<S> entry(Eigen::Index i, Eigen::Index j) const {
        LaurentPoly<S> p;
        for (int k = lo(); k <= hi(); ++k) p.set_coeff(k, coeff_ref(k)(i, j));
        p.prune(0.0);
        return p;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
        return coeffs_.empty() ? 0.0 : m;
    }

    void prune(double rel_tol = 1e-14) {
        if (coeffs_.empty()) return;
        const double thr = rel_tol * max_abs();
        for (auto& c : coeffs_) c = (c.cwiseAbs().array() > thr).select(c, Mat<S>::Zero(dim_, dim_));
        trim();
    }

    LaurentOp& operator+=(const LaurentOp& o) {
        check_dim(o);
        for (int k = o.lo(); k <= o.hi(); ++k) set_coeff(k, coeff(k) + o.coeff_ref(k));
        trim();
        return *this;
    }
    LaurentOp& operator-=(const LaurentOp& o) {
        check_dim(o);
        for (int k = o.lo(); k <= o.hi(); ++k) set_coeff(k, coeff(k) - o.coeff_ref(k));
        trim();
        return *this;
    }
    friend LaurentOp operator+(LaurentOp a, const LaurentOp& b) { return a += b; }
    friend LaurentOp operator-(LaurentOp a, const LaurentOp& b) { return a -= b; }
    friend LaurentOp operator*(S s, LaurentOp a) {
        for (auto& c : a.coeffs_) c *= s;
        return a;
    }

  private:
    void check_dim(const LaurentOp& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("LaurentOp: dimension mismatch");
    }
    void trim() {
        size_t a = 0, b = coeffs_.size();
        auto zero = [](const Mat<S>& m) { return m.cwiseAbs().maxCoeff() == 0.0; };
        while (a < b && zero(coeffs_[a])) ++a;
        while (b > a && zero(coeffs_[b - 1])) --b;
        if (a == b) {
            coeffs_.clear();
            lo_ = 0;
            return;
        }
        if (a > 0 || b < coeffs_.size()) {
            coeffs_ = std::vector<Mat<S>>(coeffs_.begin() + long(a), coeffs_.begin() + long(b));
            lo_ += int(a);
        }
    }

    Eigen::Index dim_ = 0;
    int lo_ = 0;
    std::vector<Mat<S>> coeffs_;  // empty means the zero operator
};

// --- free functions (the expression surface used throughout) ---

template <class S>
LaurentOp<S> op_mul(const LaurentOp<S>& a, const LaurentOp<S>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("op_mul: dimension mismatch");
    if (a.is_zero() || b.is_zero()) return LaurentOp<S>::zero(a.dim());
    LaurentOp<S> r(a.dim());
    for (int i = a.lo(); i <= a.hi(); ++i)
        for (int j = b.lo(); j <= b.hi(); ++j)
            r.set_coeff(i + j, r.coeff(i + j) + a.coeff_ref(i) * b.coeff_ref(j));
    return r;
}

// zeta -> c*zeta, exact on exponents.
template <class S>
LaurentOp<S> op_shift(const LaurentOp<S>& a, S c) {
    if (c == S(0)) throw std::invalid_argument("op_shift: c must be nonzero");
    LaurentOp<S> r(a.dim());
    for (int k = a.lo(); k <= a.hi(); ++k) r.set_coeff(k, std::pow(c, S(double(k))) * a.coeff_ref(k));
    return r;
}

template <class S>
Mat<S> op_eval(const LaurentOp<S>& a, S zeta) {
    if (zeta == S(0)) throw std::invalid_argument("op_eval: zeta must be nonzero");
    Mat<S> acc = Mat<S>::Zero(a.dim(), a.dim());
    if (a.is_zero()) return acc;
    for (int k = a.hi(); k >= a.lo(); --k) acc = acc * zeta + a.coeff_ref(k);
    return acc * std::pow(zeta, S(double(a.lo())));
}

// Kronecker embedding helpers (auxiliary tensor quantum conventions).
template <class S>
Mat<S> kron(const Mat<S>& a, const Mat<S>& b) {
    Mat<S> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

template <class S>
LaurentOp<S> kron(const LaurentOp<S>& a, const LaurentOp<S>& b) {
    LaurentOp<S> r(a.dim() * b.dim());
    for (int i = a.lo(); i <= a.hi(); ++i)
        for (int j = b.lo(); j <= b.hi(); ++j)
            r.set_coeff(i + j, r.coeff(i + j) + kron(a.coeff_ref(i), b.coeff_ref(j)));
    return r;
}

// Coefficient-wise max-abs of (a - b) relative to max(|a|,|b|,floor).
template <class S>
double rel_distance(const LaurentOp<S>& a, const LaurentOp<S>& b) {
    LaurentOp<S> d = a;
    d -= b;
    double scale = std::max(a.max_abs(), b.max_abs());
    if (scale == 0.0) return 0.0;
    return d.max_abs() / scale;
}

}  // namespace qloop

#endif
