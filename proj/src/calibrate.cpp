#include "qloop/calibrate.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace qloop {

LaurentOp<Cx> scalar_mul(const LaurentPoly<Cx>& s, const LaurentOp<Cx>& a) {
    LaurentOp<Cx> out(a.dim());
    if (s.is_zero() || a.is_zero()) return out;
    for (int k = s.lo(); k <= s.hi(); ++k) {
        if (s.coeff(k) == Cx(0)) continue;
        for (int j = a.lo(); j <= a.hi(); ++j) out.set_coeff(k + j, out.coeff(k + j) + s.coeff(k) * a.coeff_ref(j));
    }
    return out;
}

namespace {

// entry polynomial of op restricted to (r,c)
LaurentPoly<Cx> entry_poly(const LaurentOp<Cx>& op, Eigen::Index r, Eigen::Index c) { return op.entry(r, c); }

}  // namespace

CalibResult calibrate_and_check(const std::vector<LaurentOp<Cx>>& terms,
                                const std::vector<int>& sectors_in, const CalibOptions& opts) {
    if (terms.empty()) throw std::invalid_argument("calibrate_and_check: no terms");
    const Eigen::Index dim = terms.front().dim();
    for (const auto& t : terms)
        if (t.dim() != dim) throw std::invalid_argument("calibrate_and_check: dimension mismatch");
    const int nt = int(terms.size());

    std::vector<int> sectors = sectors_in;
    if (sectors.empty() || opts.level <= 1) sectors.assign(size_t(dim), 0);
    int nsec = 1 + *std::max_element(sectors.begin(), sectors.end());

    CalibResult out;
    out.scalars.assign(size_t(nsec), std::vector<LaurentPoly<Cx>>(size_t(nt)));

    const int w = std::max(0, opts.window);
    const int W = 2 * w + 1;

    double worst_fit = 0.0, worst_res = 0.0;

    for (int sec = 0; sec < nsec; ++sec) {
        std::vector<Eigen::Index> states;
        for (Eigen::Index u = 0; u < dim; ++u)
            if (sectors[size_t(u)] == sec) states.push_back(u);
        if (states.empty()) continue;

        // term scale within the sector block
        std::vector<double> tnorm;
        tnorm.assign(size_t(nt), 0.0);
        double block_scale = 0.0;
        for (int m = 0; m < nt; ++m) {
            for (Eigen::Index r : states)
                for (Eigen::Index c : states) {
                    double v = entry_poly(terms[size_t(m)], r, c).max_abs();
                    tnorm[size_t(m)] = std::max(tnorm[size_t(m)], v);
                }
            block_scale = std::max(block_scale, tnorm[size_t(m)]);
        }
        if (block_scale == 0.0) {
            for (int m = 0; m < nt; ++m) out.scalars[size_t(sec)][size_t(m)] = LaurentPoly<Cx>::constant(1.0);
            continue;
        }

        if (opts.level == 0) {
            LaurentOp<Cx> delta(dim);
            for (int m = 0; m < nt; ++m) {
                out.scalars[size_t(sec)][size_t(m)] = LaurentPoly<Cx>::constant(1.0);
                delta += terms[size_t(m)];
            }
            double err = 0.0;
            for (Eigen::Index r : states)
                for (Eigen::Index c : states) err = std::max(err, entry_poly(delta, r, c).max_abs());
            worst_res = std::max(worst_res, err / block_scale);
            continue;
        }

        // designated entry: the diagonal entry of the first sector state, else
        // the first row-major entry maximizing the smallest term magnitude
        auto score = [&](Eigen::Index r, Eigen::Index c) {
            double s = 1e300;
            for (int m = 0; m < nt; ++m)
                s = std::min(s, entry_poly(terms[size_t(m)], r, c).max_abs() /
                                    std::max(tnorm[size_t(m)], 1e-300));
            return s;
        };
        Eigen::Index er = states[0], ec = states[0];
        if (score(er, ec) <= 0.0) {
            double best = -1.0;
            for (Eigen::Index r : states)
                for (Eigen::Index c : states)
                    if (score(r, c) > best) {
                        best = score(r, c);
                        er = r;
                        ec = c;
                    }
        }
        if (sec == 0) {
            out.designated_row = int(er);
            out.designated_col = int(ec);
        }

        // homogeneous system sum_m s_m(zeta) p_m(zeta) = 0 on the designated entry
        std::vector<LaurentPoly<Cx>> p;
        int klo = 1 << 30, khi = -(1 << 30);
        for (int m = 0; m < nt; ++m) {
            auto pm = entry_poly(terms[size_t(m)], er, ec);
            if (tnorm[size_t(m)] > 0) pm = Cx(1.0 / tnorm[size_t(m)], 0.0) * pm;
            p.push_back(pm);
            if (!pm.is_zero()) {
                klo = std::min(klo, pm.lo() - w);
                khi = std::max(khi, pm.hi() + w);
            }
        }
        if (khi < klo) {
            klo = 0;
            khi = 0;
        }
        const int nrow = khi - klo + 1;
        MatC A = MatC::Zero(nrow, Eigen::Index(nt) * W);
        for (int m = 0; m < nt; ++m)
            for (int j = -w; j <= w; ++j)
                for (int k = p[size_t(m)].lo(); k <= p[size_t(m)].hi(); ++k)
                    A(k + j - klo, m * W + (j + w)) += p[size_t(m)].coeff(k);

        Eigen::JacobiSVD<MatC> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        VecC v = svd.matrixV().col(svd.matrixV().cols() - 1);
        double smin = svd.singularValues()[svd.singularValues().size() - 1];
        double smax = std::max(svd.singularValues()[0], 1e-300);
        worst_fit = std::max(worst_fit, smin / smax);

        // deterministic normalization: largest coefficient to one
        Eigen::Index imax = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        v /= v[imax];

        LaurentOp<Cx> delta(dim);
        double term_scale = 1e-300;
        for (int m = 0; m < nt; ++m) {
            LaurentPoly<Cx> s;
            for (int j = -w; j <= w; ++j) s.set_coeff(j, v[m * W + (j + w)] / std::max(tnorm[size_t(m)], 1e-300));
            s.prune(1e-14);
            out.scalars[size_t(sec)][size_t(m)] = s;
            LaurentOp<Cx> sm = scalar_mul(s, terms[size_t(m)]);
            for (Eigen::Index r : states)
                for (Eigen::Index c : states) term_scale = std::max(term_scale, entry_poly(sm, r, c).max_abs());
            delta += sm;
        }
        double err = 0.0;
        for (Eigen::Index r : states)
            for (Eigen::Index c : states) err = std::max(err, entry_poly(delta, r, c).max_abs());
        worst_res = std::max(worst_res, err / term_scale);
    }

    out.fit_residual = worst_fit;
    out.residual = worst_res;
    return out;
}

}  // namespace qloop
