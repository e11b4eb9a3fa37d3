#ifndef QLOOP_CHAIN_HPP
#define QLOOP_CHAIN_HPP

#include <map>
#include <optional>

#include "qloop/intertwine.hpp"
#include "qloop/osc.hpp"

namespace qloop {

// The quantum space: an ordered list of evaluation-representation sites with
// inhomogeneities and the twist.  N = 0 is the scalar quantum space.
struct ChainSpec {
    int n = 2;
    int N = 1;
    GradationS grad;
    TwistPhi twist;
    std::vector<Cx> inhom;             // per site, default 1
    std::vector<Weight> site_weights;  // default fundamental

    int K_verma_solve = 0;  // 0: pick by rank (20 for n=2, 14 for n=3)
    int K_fock_solve = 0;   // 0: pick by rank (20 for n=2, 14 for n=3)
    int max_freq = 8;       // exponential-fit frequency budget per axis sum

    static ChainSpec make(int n, int N, TwistPhi twist);
    void validate(const QParams& p) const;
};

struct ConvergenceMeta {
    std::vector<int> K;
    std::vector<double> delta;  // Cauchy deltas between successive K
    bool continued = false;     // trace evaluated by geometric continuation
};

enum class OpKind { T_finite, T_verma, Q, Qbar };

struct IntegrabilityOp {
    std::string label;
    OpKind kind = OpKind::T_finite;
    LaurentOp<Cx> op;  // payload on the quantum space, Laurent in zeta
    ConvergenceMeta meta;
};

// Startup scan of the twist regime: Verma descent ratios and Fock trace
// ratios; throws std::invalid_argument outside the workable region.
void scan_twist_regime(const QParams& p, const ChainSpec& spec);

class Chain {
  public:
    Chain(const QParams& p, ChainSpec spec, SolveOptions solver = {});

    const ChainSpec& spec() const { return spec_; }
    const QParams& params() const { return p_; }
    Eigen::Index qdim() const { return qdim_; }

    // iterated-coproduct exponent vector of h_i on the quantum space
    VecC quantum_h_exp(int i) const;
    // weight-sector id per quantum basis state (twist-diagonal blocks)
    const std::vector<int>& sectors() const { return sectors_; }

    IntegrabilityOp T_finite(const Weight& lam, bool barred = false);
    // K_trace: requested trace truncations (ascending); payload uses the last
    IntegrabilityOp T_verma(const Weight& lam, const std::vector<int>& K_trace, bool barred = false);
    IntegrabilityOp Q_op(int i, bool barred = false);

    // monodromy as a Laurent operator on aux (x) quantum (finite aux only)
    LaurentOp<Cx> monodromy_finite(const Weight& lam, bool barred = false);

    // shifted-representation transfer operator (Borel-only aux)
    IntegrabilityOp T_shifted(const Weight& lam, const std::vector<Cx>& xi,
                              const std::vector<int>& K_trace, ModuleKind kind);

    struct QLimitReport {
        std::vector<double> mu;
        std::vector<double> distance;  // after per-mu scalar calibration
        bool monotone = false;
    };
    // n = 2 limit construction vs the oscillator Q (index n, unbarred)
    QLimitReport q_limit_check(const std::vector<long>& mus, int K_trace);

    // solved site intertwiner for an auxiliary representation (cached)
    const RationalOp& pair_op(const Rep& aux, int site, bool borel);

  private:
    Rep make_site(int k) const;
    Rep& site(int k);
    // aux-diagonal blocks of the sampled monodromy: per aux state, the q x q
    // quantum matrix
    std::vector<MatC> monodromy_aux_diag(const Rep& aux, bool borel, Cx zeta);
    // twisted traces of the sampled monodromy at the requested truncations
    // (K = -1: full sum); continuation allowed for the Fock path
    std::vector<MatC> extended_traces(const Rep& aux, const std::vector<MatC>& diag,
                                      const std::vector<int>& K_request, bool allow_continuation);
    IntegrabilityOp build_traced(const Rep& aux, bool borel, const std::vector<int>& K_trace,
                                 bool allow_continuation, OpKind kind, const std::string& label);

    QParams p_;
    ChainSpec spec_;
    SolveOptions solver_;
    Eigen::Index qdim_ = 1;
    std::vector<Rep> sites_;
    std::vector<int> sectors_;
    std::map<std::string, RationalOp> pair_cache_;
    std::map<std::string, IntegrabilityOp> op_cache_;
};

}  // namespace qloop

#endif
