#include "hsigma/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "hsigma/errors.hpp"
#include "hsigma/sigma_core.hpp"

namespace hsigma {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

constexpr std::size_t kBatchesPerChain = 32;
constexpr std::size_t kAdaptEvery = 50;
constexpr double kTargetAcceptance = 0.3;

// Evaluates the u-marginal log density in preallocated storage.
class Target {
 public:
  explicit Target(const Graph& g)
      : g_(g), n_(g.n()), A_(Eigen::MatrixXd::Zero(idx(g.size()), idx(g.size()))), llt_(idx(g.n())) {}

  // Leaves A() and log_det() describing `u`.
  double operator()(const Eigen::VectorXd& u) {
    A_.setZero();
    double edge = 0.0;
    for (const Edge& e : g_.edges()) {
      const auto i = idx(e.i), j = idx(e.j);
      const double x = e.w * std::exp(u(i) + u(j));
      A_(i, j) -= x;
      A_(j, i) -= x;
      A_(i, i) += x;
      A_(j, j) += x;
      edge += e.w * (std::cosh(u(i) - u(j)) - 1.0);
    }
    llt_.compute(A_.topLeftCorner(idx(n_), idx(n_)));
    if (llt_.info() != Eigen::Success) {
      log_det_ = -std::numeric_limits<double>::infinity();
      return log_det_;
    }
    log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    return 0.5 * log_det_ - edge - u.head(idx(n_)).sum();
  }

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  double log_det() const noexcept { return log_det_; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const noexcept { return llt_; }

 private:
  const Graph& g_;
  std::size_t n_;
  Eigen::MatrixXd A_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

struct ChainPlan {
  std::size_t per_chain;
  std::size_t batches;
  std::size_t batch_size;
};

ChainPlan plan(const ChainConfig& cc) {
  const std::size_t per = (cc.n_samples + cc.n_chains - 1) / cc.n_chains;
  const std::size_t batches = std::min(kBatchesPerChain, per);
  const std::size_t size = (per + batches - 1) / batches;
  return {batches * size, batches, size};
}

struct ChainResult {
  Eigen::MatrixXd batch_means;  // batches x dim
  Eigen::VectorXd mean, m2;     // Welford over retained samples
  std::size_t accepted = 0, proposed = 0;
};

// Runs chain `c`, calling `visit(view)` on every retained draw.
template <class Visit>
void run_chain(const Graph& g, const ChainConfig& cc, std::size_t c, std::size_t retained, Visit&& visit,
               std::size_t& accepted, std::size_t& proposed) {
  const std::size_t n = g.n();
  Philox rng(cc.seed, c);
  std::normal_distribution<double> normal(0.0, 1.0);
  Target target(g);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(idx(n + 1));
  for (std::size_t i = 0; i < n; ++i) u(idx(i)) = 0.5 * normal(rng);
  double logp = target(u);
  for (int tries = 0; !std::isfinite(logp) && tries < 100; ++tries) {
    u.head(idx(n)) *= 0.5;
    logp = target(u);
  }

  std::vector<double> scale(n, cc.proposal_scale);
  std::vector<std::size_t> window_acc(n, 0);

  auto sweep = [&](bool tuning) {
    for (std::size_t i = 0; i < n; ++i) {
      const double old = u(idx(i));
      u(idx(i)) = old + scale[i] * normal(rng);
      const double cand = target(u);
      const bool accept = std::isfinite(cand) && std::log(rng.uniform()) < cand - logp;
      if (accept) {
        logp = cand;
        ++window_acc[i];
      } else {
        u(idx(i)) = old;
      }
      if (!tuning) {
        ++proposed;
        accepted += accept ? 1 : 0;
      }
    }
  };

  for (std::size_t t = 1; t <= cc.burn_in; ++t) {
    sweep(true);
    if (t % kAdaptEvery == 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double rate = static_cast<double>(window_acc[i]) / kAdaptEvery;
        scale[i] *= std::exp(2.0 * (rate - kTargetAcceptance));
        window_acc[i] = 0;
      }
    }
  }
  // Tuning is frozen from here on; restore the cached state for the current u.
  logp = target(u);

  Eigen::VectorXd s = Eigen::VectorXd::Zero(idx(n + 1));
  Eigen::VectorXd z(idx(n));
  for (std::size_t k = 0; k < retained; ++k) {
    for (std::size_t t = 0; t < cc.thinning; ++t) sweep(false);
    target(u);
    for (std::size_t i = 0; i < n; ++i) z(idx(i)) = normal(rng);
    s.head(idx(n)) = target.llt().matrixU().solve(z);
    const SampleView view{g, u, s, target.A(), target.log_det()};
    visit(view);
  }
}

double gelman_rubin(const std::vector<ChainResult>& chains, Eigen::Index k, std::size_t per) {
  const std::size_t m = chains.size();
  if (m < 2 || per < 2) return 1.0;
  const double N = static_cast<double>(per);
  double w = 0.0, grand = 0.0;
  for (const auto& c : chains) {
    w += c.m2(k) / (N - 1.0);
    grand += c.mean(k);
  }
  w /= static_cast<double>(m);
  grand /= static_cast<double>(m);
  double b = 0.0;
  for (const auto& c : chains) b += (c.mean(k) - grand) * (c.mean(k) - grand);
  b *= N / static_cast<double>(m - 1);
  // Spread at rounding level means a per-sample constant; the ratio would only measure noise.
  const double scale = 1e-12 * std::max(1.0, std::abs(grand));
  if (!(w > scale * scale)) return 1.0;
  const double var_plus = (N - 1.0) / N * w + b / N;
  return std::sqrt(var_plus / w);
}

}  // namespace

void validate(const ChainConfig& cc) {
  if (cc.n_samples < 1 || cc.burn_in < 1 || cc.thinning < 1 || cc.n_chains < 1) {
    throw DomainError("chain counts must be at least 1");
  }
  if (!(cc.proposal_scale > 0.0) || !std::isfinite(cc.proposal_scale)) {
    throw DomainError("proposal scale must be positive");
  }
}

double Estimate::max_rhat() const { return rhat.size() ? rhat.maxCoeff() : 1.0; }

double log_u_marginal(const Graph& g, const Eigen::VectorXd& u) {
  Target t(g);
  return t(u);
}

Eigen::VectorXd sample_s_given_u(const Graph& g, const Eigen::VectorXd& u, Philox& rng) {
  const auto n = idx(g.n());
  Eigen::MatrixXd A = build_A(g, u);
  Eigen::LLT<Eigen::MatrixXd> llt(A.topLeftCorner(n, n));
  if (llt.info() != Eigen::Success) throw PositiveDefinitenessError("A_VV is not positive definite");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n + 1);
  s.head(n) = llt.matrixU().solve(z);
  return s;
}

Estimate expect(const Graph& g, const VectorObservable& f, std::size_t dim, const ChainConfig& cc) {
  validate(cc);
  const ChainPlan p = plan(cc);
  const auto d = idx(dim);
  std::vector<ChainResult> results(cc.n_chains);
  std::vector<std::exception_ptr> errors(cc.n_chains);

  auto work = [&](std::size_t c) {
    try {
      ChainResult& r = results[c];
      r.batch_means = Eigen::MatrixXd::Zero(idx(p.batches), d);
      r.mean = Eigen::VectorXd::Zero(d);
      r.m2 = Eigen::VectorXd::Zero(d);
      Eigen::VectorXd buf(d), batch = Eigen::VectorXd::Zero(d);
      std::size_t count = 0;
      run_chain(
          g, cc, c, p.per_chain,
          [&](const SampleView& v) {
            buf.setZero();
            f(v, buf.data());
            for (Eigen::Index k = 0; k < d; ++k) {
              if (!std::isfinite(buf(k))) {
                std::ostringstream msg;
                msg << "observable component " << k << " is not finite (chain " << c << ", draw " << count << ")";
                throw EstimationFailure(msg.str());
              }
            }
            ++count;
            const Eigen::VectorXd delta = buf - r.mean;
            r.mean += delta / static_cast<double>(count);
            r.m2 += delta.cwiseProduct(buf - r.mean);
            batch += buf;
            if (count % p.batch_size == 0) {
              r.batch_means.row(idx(count / p.batch_size - 1)) = batch.transpose() / static_cast<double>(p.batch_size);
              batch.setZero();
            }
          },
          r.accepted, r.proposed);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  if (cc.n_chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t c = 0; c < cc.n_chains; ++c) threads.emplace_back(work, c);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Estimate est;
  est.seed = cc.seed;
  est.n_samples = p.per_chain * cc.n_chains;
  const double total_batches = static_cast<double>(p.batches * cc.n_chains);
  est.mean = Eigen::VectorXd::Zero(d);
  for (const auto& r : results) est.mean += r.batch_means.colwise().sum().transpose();
  est.mean /= total_batches;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(d), m2 = Eigen::VectorXd::Zero(d);
  for (const auto& r : results) {
    for (Eigen::Index b = 0; b < r.batch_means.rows(); ++b) {
      const Eigen::VectorXd dev = r.batch_means.row(b).transpose() - est.mean;
      ss += dev.cwiseProduct(dev);
    }
    const Eigen::VectorXd dm = r.mean - est.mean;
    m2 += r.m2 + static_cast<double>(p.per_chain) * dm.cwiseProduct(dm);
  }
  est.std_error = Eigen::VectorXd::Zero(d);
  if (total_batches > 1) est.std_error = (ss / ((total_batches - 1.0) * total_batches)).cwiseSqrt();
  est.n_effective.resize(d);
  est.rhat.resize(d);
  const double N = static_cast<double>(est.n_samples);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double var = N > 1 ? m2(k) / (N - 1.0) : 0.0;
    const double se2 = est.std_error(k) * est.std_error(k);
    est.n_effective(k) = se2 > 0.0 ? var / se2 : N;
    est.rhat(k) = gelman_rubin(results, k, p.per_chain);
  }
  std::size_t acc = 0, prop = 0;
  for (const auto& r : results) {
    acc += r.accepted;
    prop += r.proposed;
  }
  est.acceptance = prop ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
  return est;
}

Estimate expect(const Graph& g, const std::function<double(const SampleView&)>& f, const ChainConfig& cc) {
  return expect(g, [&f](const SampleView& v, double* out) { out[0] = f(v); }, 1, cc);
}

Estimate expect_complex(const Graph& g, const std::function<std::complex<double>(const SampleView&)>& f,
                        const ChainConfig& cc) {
  return expect(
      g,
      [&f](const SampleView& v, double* out) {
        const std::complex<double> z = f(v);
        out[0] = z.real();
        out[1] = z.imag();
      },
      2, cc);
}

void for_each_sample(const Graph& g, const ChainConfig& cc,
                     const std::function<void(std::size_t, const SampleView&)>& sink) {
  validate(cc);
  const std::size_t per = (cc.n_samples + cc.n_chains - 1) / cc.n_chains;
  for (std::size_t c = 0; c < cc.n_chains; ++c) {
    std::size_t acc = 0, prop = 0;
    run_chain(g, cc, c, per, [&](const SampleView& v) { sink(c, v); }, acc, prop);
  }
}

SuperContext::SuperContext(const Graph& g, const AlgebraPtr& p) : params(p), n_vertices(g.n()) {
  algebra = make_field_algebra(g.labels(), params ? params->names() : std::vector<std::string>{});
}

ComplexGrassmann SuperContext::psibar(std::size_t i) const { return ComplexGrassmann::generator(algebra, 2 * i); }

ComplexGrassmann SuperContext::psi(std::size_t i) const { return ComplexGrassmann::generator(algebra, 2 * i + 1); }

ComplexGrassmann SuperContext::lift(const ComplexGrassmann& x) const {
  if (!x.algebra()) return ComplexGrassmann(algebra, x.body());
  if (!params || !same_algebra(x.algebra(), params)) throw AlgebraMismatch("element is not over the parameter algebra");
  std::vector<std::size_t> map(params->size());
  for (std::size_t k = 0; k < map.size(); ++k) map[k] = 2 * n_vertices + k;
  return x.embed(algebra, map);
}

ComplexGrassmann SuperContext::lift(const GrassmannElement& x) const { return lift(to_complex(x)); }

GrassmannElement SuperContext::lift_real(const GrassmannElement& x) const {
  if (!x.algebra()) return GrassmannElement(algebra, x.body());
  if (!params || !same_algebra(x.algebra(), params)) throw AlgebraMismatch("element is not over the parameter algebra");
  std::vector<std::size_t> map(params->size());
  for (std::size_t k = 0; k < map.size(); ++k) map[k] = 2 * n_vertices + k;
  return x.embed(algebra, map);
}

std::vector<std::pair<std::size_t, std::size_t>> SuperContext::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> p;
  for (std::size_t i = 0; i < n_vertices; ++i) p.emplace_back(2 * i, 2 * i + 1);
  return p;
}

ComplexGrassmann SuperContext::project(const ComplexGrassmann& x) const {
  const std::size_t shift = 2 * n_vertices;
  const Mask field = shift >= 64 ? ~Mask{0} : ((Mask{1} << shift) - 1);
  std::vector<ComplexGrassmann::Term> out;
  for (const auto& [m, c] : x.terms()) {
    if (m & field) throw InvariantViolation("field generators survive the Berezin integral");
    out.emplace_back(m >> shift, c);
  }
  return ComplexGrassmann(params, std::move(out));
}

ComplexGrassmann SuperContext::gaussian_weight(const Eigen::MatrixXd& A) const {
  ComplexGrassmann w(algebra, 1.0);
  for (std::size_t i = 0; i < n_vertices; ++i)
    for (std::size_t j = 0; j < n_vertices; ++j) {
      const double a = A(idx(i), idx(j));
      if (a != 0.0) w *= ComplexGrassmann(algebra, 1.0) - psibar(i) * psi(j) * std::complex<double>(a);
    }
  return w;
}

ComplexGrassmann SuperContext::gaussian_weight(const GMatrix& A) const {
  ComplexGrassmann w(algebra, 1.0);
  for (std::size_t i = 0; i < n_vertices; ++i)
    for (std::size_t j = 0; j < n_vertices; ++j)
      if (!A(i, j).is_zero()) w *= ComplexGrassmann(algebra, 1.0) - lift(A(i, j)) * psibar(i) * psi(j);
  return w;
}

ComplexGrassmann berezin_reduce(const SuperContext& ctx, const ComplexGrassmann& h, double log_det) {
  ComplexGrassmann r = berezin_integral(h, ctx.pairs());
  r *= std::complex<double>(std::exp(-log_det));
  return ctx.project(r);
}

ComplexGrassmann SuperEstimate::mean() const {
  std::vector<ComplexGrassmann::Term> t;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    t.emplace_back(masks[k], std::complex<double>(raw.mean(idx(2 * k)), raw.mean(idx(2 * k + 1))));
  }
  return ComplexGrassmann(params, std::move(t));
}

std::complex<double> SuperEstimate::coeff(Mask m) const {
  auto it = std::lower_bound(masks.begin(), masks.end(), m);
  if (it == masks.end() || *it != m) throw DomainError("mask outside the parameter algebra");
  const auto k = static_cast<std::size_t>(it - masks.begin());
  return {raw.mean(idx(2 * k)), raw.mean(idx(2 * k + 1))};
}

std::complex<double> SuperEstimate::std_error(Mask m) const {
  auto it = std::lower_bound(masks.begin(), masks.end(), m);
  if (it == masks.end() || *it != m) throw DomainError("mask outside the parameter algebra");
  const auto k = static_cast<std::size_t>(it - masks.begin());
  return {raw.std_error(idx(2 * k)), raw.std_error(idx(2 * k + 1))};
}

SuperEstimate super_expect(const Graph& g, const SuperIntegrand& h, const AlgebraPtr& params, const ChainConfig& cc) {
  const SuperContext ctx(g, params);
  const std::size_t m = params ? params->size() : 0;
  if (m > 16) throw DomainError("parameter algebra too large for coefficientwise estimation");
  SuperEstimate out;
  out.params = params;
  for (Mask k = 0; k < (Mask{1} << m); ++k) out.masks.push_back(k);
  const std::size_t dim = 2 * out.masks.size();
  out.raw = expect(
      g,
      [&](const SampleView& v, double* buf) {
        const ComplexGrassmann r = berezin_reduce(ctx, h(v, ctx), v.log_det);
        for (const auto& [mask, c] : r.terms()) {
          buf[2 * mask] = c.real();
          buf[2 * mask + 1] = c.imag();
        }
      },
      dim, cc);
  return out;
}

}  // namespace hsigma
