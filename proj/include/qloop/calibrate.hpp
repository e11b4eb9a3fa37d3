#ifndef QLOOP_CALIBRATE_HPP
#define QLOOP_CALIBRATE_HPP

#include "qloop/laurent.hpp"

namespace qloop {

// Scalar calibration of a relation sum_m s_m(zeta) O_m(zeta) = 0: the anchor
// normalization of each operator family differs from the universal one by
// scalar functions only, so each term receives a low-degree Laurent scalar,
// fitted on one designated matrix entry (homogeneous least squares) and then
// verified coefficient-wise on all entries.  Level 2 fits per weight sector
// (the relation constants act diagonally per sector), level 1 fits one global
// scalar per term, level 0 fixes all scalars to 1.

struct CalibOptions {
    int level = 1;
    int window = 2;        // scalar exponents in [-window, window]
    double zero_tol = 0.0; // entries below this relative size count as empty
};

struct CalibResult {
    // scalars[sector][term]; a single sector at level <= 1
    std::vector<std::vector<LaurentPoly<Cx>>> scalars;
    double fit_residual = 0.0;  // on the designated entries
    double residual = 0.0;      // coefficient-wise over all entries, after calibration
    int designated_row = 0, designated_col = 0;  // of sector 0
};

// terms must share dimension; sectors: per-state sector id (empty: one sector)
CalibResult calibrate_and_check(const std::vector<LaurentOp<Cx>>& terms,
                                const std::vector<int>& sectors, const CalibOptions& opts);

// scalar-polynomial times operator
LaurentOp<Cx> scalar_mul(const LaurentPoly<Cx>& s, const LaurentOp<Cx>& a);

}  // namespace qloop

#endif
