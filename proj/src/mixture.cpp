#include "knightian/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace knightian::prior {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double weight_of(const toyvm::Event& e, std::uint8_t bit) {
  switch (e.kind) {
    case toyvm::EventKind::Emit: return e.bit == bit ? 1.0 : 0.0;
    case toyvm::EventKind::Random: return 0.5;
    default: return 0.0;
  }
}

std::vector<double> log2_weights(const std::vector<Hypothesis>& hyps) {
  std::vector<double> out(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) out[i] = hyps[i].log2_prior + hyps[i].log2_likelihood;
  return out;
}

}  // namespace

Mixture Mixture::build(unsigned max_len, const toyvm::MachineConfig& cfg, kernels::Exec policy) {
  cfg.validate();
  Mixture m;
  m.max_len_ = max_len;
  m.cfg_ = cfg;
  m.programs_ = std::make_shared<const std::vector<toyvm::Program>>(toyvm::enumerate(max_len));
  const auto& programs = *m.programs_;

  // C = (sum_P 2^(L - |P|)) / 2^L, exact in 64-bit integers for L <= 24.
  std::uint64_t kraft = 0;
  for (const auto& p : programs) kraft += std::uint64_t{1} << (max_len - p.length());
  m.log2_c_ = std::log2(static_cast<double>(kraft)) - static_cast<double>(max_len);

  m.hyps_.resize(programs.size());
  kernels::for_each_index(programs.size(), policy, [&](std::size_t i) {
    auto& h = m.hyps_[i];
    h.program = &programs[i];
    h.log2_prior = -static_cast<double>(programs[i].length()) - m.log2_c_;
    h.log2_likelihood = 0.0;
    h.next = toyvm::advance(programs[i], h.cursor, cfg);
  });
  m.log2_mass_ = kernels::log2_sum(log2_weights(m.hyps_));
  m.log2_sequential_ = 0.0;
  return m;
}

double Mixture::normalizer() const { return std::exp2(log2_c_); }

double Mixture::prior_weight(std::size_t i) const { return std::exp2(hyps_.at(i).log2_prior); }

std::vector<double> Mixture::posterior_weights() const {
  std::vector<double> out(hyps_.size(), 0.0);
  if (log2_mass_ == kNegInf) return out;
  for (std::size_t i = 0; i < hyps_.size(); ++i) {
    out[i] = std::exp2(hyps_[i].log2_prior + hyps_[i].log2_likelihood - log2_mass_);
  }
  return out;
}

std::pair<double, double> Mixture::next_masses() const {
  if (log2_mass_ == kNegInf) return {0.0, 0.0};
  const auto lw = log2_weights(hyps_);
  std::vector<double> w0(hyps_.size());
  std::vector<double> w1(hyps_.size());
  for (std::size_t i = 0; i < hyps_.size(); ++i) {
    w0[i] = weight_of(hyps_[i].next, 0);
    w1[i] = weight_of(hyps_[i].next, 1);
  }
  const double l0 = kernels::log2_weighted_sum(lw, w0);
  const double l1 = kernels::log2_weighted_sum(lw, w1);
  return {l0 == kNegInf ? 0.0 : std::exp2(l0 - log2_mass_), l1 == kNegInf ? 0.0 : std::exp2(l1 - log2_mass_)};
}

Mixture Mixture::update(std::uint8_t bit, kernels::Exec policy) const {
  const auto [a0, a1] = next_masses();
  Mixture next = *this;
  next.history_.push_back(bit);
  kernels::for_each_index(next.hyps_.size(), policy, [&](std::size_t i) {
    auto& h = next.hyps_[i];
    if (h.log2_likelihood == kNegInf) return;
    const double w = weight_of(h.next, bit);
    if (w == 0.0) {
      h.log2_likelihood = kNegInf;
      return;
    }
    h.log2_likelihood += std::log2(w);
    h.next = toyvm::advance(*h.program, h.cursor, cfg_);
  });
  next.log2_mass_ = kernels::log2_sum(log2_weights(next.hyps_));
  const double committed = a0 + a1;
  const double realized = bit ? a1 : a0;
  next.log2_sequential_ =
      (committed > 0.0 && realized > 0.0) ? log2_sequential_ + std::log2(realized / committed) : kNegInf;
  return next;
}

double predict_next(const Mixture& m) {
  const auto [a0, a1] = m.next_masses();
  if (!(a0 + a1 > 0.0)) throw ZeroMassHistory(m.history().size());
  return a1 / (a0 + a1);
}

double log2_program_probability(const toyvm::Program& p, const Bits& seq, const toyvm::MachineConfig& cfg) {
  toyvm::MachineState s;
  double lp = 0.0;
  for (auto bit : seq) {
    const auto e = toyvm::advance(p, s, cfg);
    const double w = weight_of(e, bit);
    if (w == 0.0) return kNegInf;
    lp += std::log2(w);
  }
  return lp;
}

RegretReport regret_report(const toyvm::Program& q, const Bits& sequence, const Mixture& m,
                           const std::vector<double>& eps_list) {
  const auto& hyps = m.hypotheses();
  const auto it = std::find_if(hyps.begin(), hyps.end(), [&](const Hypothesis& h) { return *h.program == q; });
  if (it == hyps.end()) {
    throw ValidationError("NotAHypothesis", "program " + q.to_string() + " is not in the mixture");
  }
  const auto qi = static_cast<std::size_t>(it - hyps.begin());
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("BadEpsilon", "epsilon must lie in (0, 1)");
  }

  RegretReport rep{q, it->log2_prior, {}, 1.0, 0.0, {}};
  Mixture cur = m;
  double cum = 1.0;
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    const auto bit = sequence[n];
    const auto& hq = cur.hypotheses()[qi];
    const double p_q = hq.log2_likelihood == kNegInf ? 0.0 : weight_of(hq.next, bit);
    if (p_q == 0.0) throw UnsupportedSequence(n);
    const auto [a0, a1] = cur.next_masses();
    // Q commits with positive posterior mass, so a0 + a1 > 0 here.
    const double p_u = (bit ? a1 : a0) / (a0 + a1);
    const double ratio = p_u / p_q;
    cum *= ratio;
    rep.log2_ratio_product += std::log2(ratio);
    rep.steps.push_back({n, bit, p_u, p_q, ratio, cum});
    cur = cur.update(bit);
  }
  rep.ratio_product = cum;

  for (double eps : eps_list) {
    MistakeTally t;
    t.epsilon = eps;
    for (const auto& s : rep.steps) {
      if (s.p_u < (1.0 - eps) * s.p_q) {
        ++t.count;
      } else {
        t.offset_log2 += std::log2(s.ratio);
      }
    }
    t.bound = (-rep.log2_prior_q + t.offset_log2) / std::log2(1.0 / (1.0 - eps));
    rep.mistakes.push_back(t);
  }
  return rep;
}

DiagonalResult diagonal_sequence(const Mixture& m, unsigned n) {
  if (n < 1) throw ValidationError("BadLength", "diagonal length must be >= 1");
  DiagonalResult out;
  Mixture cur = m;
  for (unsigned k = 0; k < n; ++k) {
    const auto [a0, a1] = cur.next_masses();
    if (!(a0 + a1 > 0.0)) throw ZeroMassHistory(k);
    const std::uint8_t b = a1 > a0 ? 0 : 1;
    const double p = (b ? a1 : a0) / (a0 + a1);
    out.bits.push_back(b);
    out.realized_probability.push_back(p);
    out.log2_cumulative += std::log2(p);
    cur = cur.update(b);
  }
  return out;
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(numerator), -static_cast<int>(exponent)); }

std::string Dyadic::to_string() const {
  if (numerator == 0) return "0";
  auto num = numerator;
  auto e = exponent;
  while (e > 0 && num % 2 == 0) {
    num /= 2;
    --e;
  }
  if (e == 0) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(std::uint64_t{1} << e);
}

Dyadic omega_truncated(unsigned max_len, const toyvm::MachineConfig& cfg, kernels::Exec policy) {
  const auto programs = toyvm::enumerate(max_len);
  // Random bits never steer control flow in toyvm-1, so one run per program
  // decides halting for every random stream.
  const auto runs = kernels::run_all(programs, cfg, policy);
  Dyadic d{0, max_len};
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (runs[i].halted) d.numerator += std::uint64_t{1} << (max_len - programs[i].length());
  }
  return d;
}

}  // namespace knightian::prior
