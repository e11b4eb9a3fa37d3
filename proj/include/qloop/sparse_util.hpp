#ifndef QLOOP_SPARSE_UTIL_HPP
#define QLOOP_SPARSE_UTIL_HPP

#include "qloop/rep.hpp"

namespace qloop {

inline SpMatC sp_diag_qpow(const QParams& p, const VecC& exps, Cx nu = 1.0) {
    SpMatC d(exps.size(), exps.size());
    d.reserve(Eigen::VectorXi::Constant(int(exps.size()), 1));
    for (Eigen::Index s = 0; s < exps.size(); ++s) d.insert(s, s) = qpow(p, nu * exps[s]);
    d.makeCompressed();
    return d;
}

inline SpMatC sp_kron(const SpMatC& a, const SpMatC& b) {
    std::vector<Eigen::Triplet<Cx>> t;
    t.reserve(size_t(a.nonZeros()) * size_t(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SpMatC::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SpMatC::InnerIterator ib(b, kb); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
    SpMatC r(a.rows() * b.rows(), a.cols() * b.cols());
    r.setFromTriplets(t.begin(), t.end());
    r.makeCompressed();
    return r;
}

inline SpMatC sp_identity(Eigen::Index d) {
    SpMatC i(d, d);
    i.setIdentity();
    return i;
}

}  // namespace qloop

#endif
