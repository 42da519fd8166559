// Copyright 2025 The qconf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qconf/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "qconf/budget.hpp"
#include "qconf/errors.hpp"

namespace qconf {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;
constexpr long long kMaxSequences = 1LL << 22;

std::uint64_t mulmod61(std::uint64_t x, std::uint64_t y) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * y) % kMersenne61);
}

/// Per-copy support and index arithmetic for the n-fold source.
struct SourceView {
  const CqState* base = nullptr;
  int n = 1;
  int m = 0;
  std::vector<int> alphabet_sizes;
  std::vector<long long> string_counts;   // S_j = |X_j|^n
  long long tuple_domain = 1;             // prod S_j
  std::vector<std::vector<int>> support;  // stored tuples, lexicographic
  std::vector<double> support_p;
  int eve_dim = 1;

  SourceView(const CqState& cq, int block) : base(&cq), n(block) {
    m = cq.parties();
    require(n >= 1, "block length must be positive");
    for (const auto& a : cq.outcome_alphabets)
      alphabet_sizes.push_back(static_cast<int>(a.size()));
    for (int j = 0; j < m; ++j) {
      long long s = 1;
      for (int c = 0; c < n; ++c) {
        s *= alphabet_sizes[j];
        require(s < (1LL << 40), "outcome-string space too large");
      }
      string_counts.push_back(s);
      tuple_domain *= s;
      require(tuple_domain < (1LL << 60), "tuple space too large");
    }
    for (const auto& [tuple, w] : cq.weights) {
      support.push_back(tuple);
      support_p.push_back(w.trace().real());
    }
    eve_dim = cq.residual_profile.dims.back();
    double seqs = std::pow(static_cast<double>(support.size()),
                           static_cast<double>(n));
    if (seqs > static_cast<double>(kMaxSequences))
      throw BudgetError("protocol enumeration: too many outcome sequences");
  }

  /// Party-j string index of a sequence of per-copy support positions.
  long long string_of(const std::vector<int>& seq, int j) const {
    long long s = 0;
    for (int c = 0; c < n; ++c) s = s * alphabet_sizes[j] + support[seq[c]][j];
    return s;
  }

  long long tuple_index(const std::vector<long long>& strings) const {
    long long t = 0;
    for (int j = 0; j < m; ++j) t = t * string_counts[j] + strings[j];
    return t;
  }

  double sequence_probability(const std::vector<int>& seq) const {
    double p = 1.0;
    for (int c : seq) p *= support_p[c];
    return p;
  }

  /// Probability of an arbitrary string tuple (not necessarily on support).
  double tuple_probability(const std::vector<long long>& strings) const {
    double p = 1.0;
    for (int c = 0; c < n && p > 0.0; ++c) {
      std::vector<int> copy_tuple(m);
      for (int j = 0; j < m; ++j) {
        long long s = strings[j];
        for (int c2 = n - 1; c2 > c; --c2) s /= alphabet_sizes[j];
        copy_tuple[j] = static_cast<int>(s % alphabet_sizes[j]);
      }
      p *= base->probability(copy_tuple);
    }
    return p;
  }
};

/// Odometer over all length-n sequences of support positions.
bool advance(std::vector<int>& seq, int limit) {
  int pos = static_cast<int>(seq.size()) - 1;
  while (pos >= 0) {
    if (++seq[pos] < limit) return true;
    seq[pos] = 0;
    --pos;
  }
  return false;
}

}  // namespace

std::vector<std::vector<long long>> Binning::inverse() const {
  std::vector<std::vector<long long>> inv(static_cast<size_t>(bins));
  for (long long s = 0; s < domain; ++s)
    inv[static_cast<size_t>(assignment[s])].push_back(s);
  return inv;
}

Binning Binning::random(long long domain, long long bins, Rng rng) {
  require(domain >= 1 && bins >= 1, "binning: invalid sizes");
  Binning b;
  b.domain = domain;
  b.bins = bins;
  b.assignment.resize(static_cast<size_t>(domain));
  for (long long s = 0; s < domain; ++s)
    b.assignment[static_cast<size_t>(s)] =
        static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(bins)));
  return b;
}

Binning Binning::identity(long long domain, long long bins) {
  require(domain >= 1 && bins >= 1, "binning: invalid sizes");
  Binning b;
  b.domain = domain;
  b.bins = bins;
  b.assignment.resize(static_cast<size_t>(domain));
  for (long long s = 0; s < domain; ++s)
    b.assignment[static_cast<size_t>(s)] = s % bins;
  return b;
}

std::vector<Binning> random_binning(const std::vector<long long>& domains,
                                    const std::vector<long long>& bin_counts,
                                    std::uint64_t seed) {
  require(domains.size() == bin_counts.size(),
          "random_binning: size mismatch");
  Rng root(seed);
  std::vector<Binning> out;
  for (size_t j = 0; j < domains.size(); ++j)
    out.push_back(Binning::random(domains[j], bin_counts[j],
                                  root.fork("binning", j)));
  return out;
}

UniversalHash UniversalHash::seeded(std::uint64_t seed, long long range) {
  require(range >= 1, "hash: invalid range");
  UniversalHash h;
  h.identity_ = false;
  h.range_ = range;
  Rng rng = Rng(seed).fork("privacy-amplification");
  h.a_ = 1 + rng.next_below(kMersenne61 - 1);
  h.b_ = rng.next_below(kMersenne61);
  return h;
}

UniversalHash UniversalHash::identity(long long range) {
  require(range >= 1, "hash: invalid range");
  UniversalHash h;
  h.identity_ = true;
  h.range_ = range;
  return h;
}

long long UniversalHash::operator()(long long x) const {
  if (identity_) return x % range_;
  std::uint64_t v = mulmod61(a_, static_cast<std::uint64_t>(x));
  v = (v + b_) % kMersenne61;
  return static_cast<long long>(v % static_cast<std::uint64_t>(range_));
}

CqState build_iid_source(const CqState& cq, int n) {
  cq.validate();
  SourceView view(cq, n);
  long long eve_total = 1;
  for (int c = 0; c < n; ++c) {
    eve_total *= view.eve_dim;
    check_dim(eve_total, "iid source Eve block");
  }

  CqState out;
  out.outcome_alphabets.resize(view.m);
  for (int j = 0; j < view.m; ++j) {
    std::vector<std::string> strings;
    for (long long s = 0; s < view.string_counts[j]; ++s) {
      long long rest = s;
      std::string label;
      std::vector<std::string> parts(n);
      for (int c = n - 1; c >= 0; --c) {
        parts[c] = cq.outcome_alphabets[j][rest % view.alphabet_sizes[j]];
        rest /= view.alphabet_sizes[j];
      }
      for (const auto& part : parts) label += part;
      strings.push_back(label);
    }
    out.outcome_alphabets[j] = std::move(strings);
    out.residual_profile.dims.push_back(1);
    out.residual_profile.labels.push_back(cq.residual_profile.labels[j]);
  }
  out.residual_profile.dims.push_back(static_cast<int>(eve_total));
  out.residual_profile.labels.push_back(cq.residual_profile.labels.back());

  const int eve = cq.eve_system();
  std::vector<int> seq(n, 0);
  do {
    ComplexMatrix op = ComplexMatrix::Ones(1, 1);
    for (int c : seq) op = kron(op, cq.residual(view.support[c], {eve}));
    if (op.trace().real() > 1e-12) {
      std::vector<int> key(view.m);
      for (int j = 0; j < view.m; ++j)
        key[j] = static_cast<int>(view.string_of(seq, j));
      out.weights[key] = op;
    }
  } while (advance(seq, static_cast<int>(view.support.size())));
  return out;
}

namespace {

/// ML decode for one player: maximum-posterior candidate consistent with
/// the bins and the player's own string; lexicographic tie-break.
long long ml_decode(const SourceView& view,
                    const std::vector<std::vector<std::vector<long long>>>& inv,
                    const std::vector<long long>& bins,
                    const std::vector<long long>& own_strings, int j) {
  const int m = view.m;
  std::vector<const std::vector<long long>*> pools(m);
  std::vector<long long> fixed(m);
  for (int i = 0; i < m; ++i) {
    if (i == j) {
      pools[i] = nullptr;
      fixed[i] = own_strings[j];
    } else {
      pools[i] = &inv[i][static_cast<size_t>(bins[i])];
    }
  }

  std::vector<size_t> cursor(m, 0);
  std::vector<long long> candidate(m);
  long long best_index = -1;
  double best_p = -1.0;
  while (true) {
    for (int i = 0; i < m; ++i)
      candidate[i] = pools[i] ? (*pools[i])[cursor[i]] : fixed[i];
    double p = view.tuple_probability(candidate);
    if (p > best_p + 1e-15) {  // strict improvement keeps the first maximum
      best_p = p;
      best_index = view.tuple_index(candidate);
    }
    int pos = m - 1;
    while (pos >= 0) {
      if (pools[pos] && ++cursor[pos] < pools[pos]->size()) break;
      cursor[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best_index;
}

struct PgmPovm {
  std::vector<long long> candidates;  // full-tuple indices, lexicographic
  std::vector<ComplexMatrix> elements;
};

/// Pseudo-inverse square root on the support (eigenvalues <= 1e-12 are 0).
ComplexMatrix pinv_sqrt(const ComplexMatrix& m) {
  EigenSystem es = hermitian_eigen(m);
  RealVector inv(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    inv[i] = es.values[i] > 1e-12 ? 1.0 / std::sqrt(es.values[i]) : 0.0;
  return es.vectors * inv.asDiagonal() * es.vectors.adjoint();
}

/// PGM of player j over bin-consistent candidates, on A'_j^n. Any residual
/// of completeness outside the Gram support is assigned to the first
/// candidate so the elements always sum to the identity.
PgmPovm build_pgm(const SourceView& view,
                  const std::vector<std::vector<std::vector<long long>>>& inv,
                  const std::vector<long long>& bins,
                  const std::vector<long long>& own_strings, int j,
                  long long aj_total) {
  const int m = view.m;
  PgmPovm povm;
  std::vector<const std::vector<long long>*> pools(m);
  for (int i = 0; i < m; ++i)
    pools[i] = (i == j) ? nullptr : &inv[i][static_cast<size_t>(bins[i])];

  std::vector<size_t> cursor(m, 0);
  std::vector<long long> candidate(m);
  std::vector<ComplexMatrix> sigmas;
  ComplexMatrix gram = ComplexMatrix::Zero(aj_total, aj_total);
  while (true) {
    for (int i = 0; i < m; ++i)
      candidate[i] = pools[i] ? (*pools[i])[cursor[i]] : own_strings[i];
    // Residual of A'_j^n for this candidate: per-copy partial trace,
    // tensored; zero off the support.
    ComplexMatrix sigma = ComplexMatrix::Ones(1, 1);
    bool on_support = true;
    for (int c = 0; c < view.n && on_support; ++c) {
      std::vector<int> copy_tuple(m);
      for (int i = 0; i < m; ++i) {
        long long s = candidate[i];
        for (int c2 = view.n - 1; c2 > c; --c2) s /= view.alphabet_sizes[i];
        copy_tuple[i] = static_cast<int>(s % view.alphabet_sizes[i]);
      }
      if (view.base->weights.count(copy_tuple) == 0) {
        on_support = false;
        break;
      }
      sigma = kron(sigma, view.base->residual(copy_tuple, {j}));
    }
    povm.candidates.push_back(view.tuple_index(candidate));
    if (on_support) {
      povm.elements.push_back(sigma);
      gram += sigma;
    } else {
      povm.elements.push_back(ComplexMatrix::Zero(aj_total, aj_total));
    }

    int pos = m - 1;
    while (pos >= 0) {
      if (pools[pos] && ++cursor[pos] < pools[pos]->size()) break;
      cursor[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  ComplexMatrix root = pinv_sqrt(gram);
  ComplexMatrix total = ComplexMatrix::Zero(aj_total, aj_total);
  for (auto& element : povm.elements) {
    element = root * element * root;
    total += element;
  }
  povm.elements.front() += identity_matrix(static_cast<int>(aj_total)) - total;
  return povm;
}

}  // namespace

DecodeResult decode_omniscience(const CqState& base, int n,
                                const std::vector<Binning>& binnings,
                                Decoder decoder) {
  base.validate();
  SourceView view(base, n);
  require(static_cast<int>(binnings.size()) == view.m,
          "decode: need one binning per party");
  for (int j = 0; j < view.m; ++j) {
    require(binnings[j].domain == view.string_counts[j],
            "decode: binning domain mismatch for party " + std::to_string(j + 1));
  }

  std::vector<std::vector<std::vector<long long>>> inv;
  for (const auto& b : binnings) inv.push_back(b.inverse());

  DecodeResult result;
  result.parties = view.m;
  result.tuple_domain = view.tuple_domain;

  // Residual bookkeeping for the joint-measurement decoder.
  std::vector<long long> aj_total(view.m, 1);
  long long eve_total = 1;
  if (decoder == Decoder::PGM) {
    for (int j = 0; j < view.m; ++j) {
      for (int c = 0; c < n; ++c)
        aj_total[j] *= base.residual_profile.dims[j];
      check_dim(aj_total[j], "joint-decoder residual block");
    }
  }
  for (int c = 0; c < n; ++c) eve_total *= view.eve_dim;
  check_dim(eve_total, "Eve block");

  const int eve = base.eve_system();
  std::vector<int> seq(n, 0);
  do {
    double p = view.sequence_probability(seq);
    if (p <= 0.0) continue;
    std::vector<long long> strings(view.m);
    for (int j = 0; j < view.m; ++j) strings[j] = view.string_of(seq, j);
    std::vector<long long> bins(view.m);
    for (int j = 0; j < view.m; ++j) bins[j] = binnings[j](strings[j]);
    long long true_index = view.tuple_index(strings);

    ComplexMatrix eve_op = ComplexMatrix::Ones(1, 1);
    for (int c : seq) eve_op = kron(eve_op, base.residual(view.support[c], {eve}));

    DecodeEntry entry;
    entry.true_index = true_index;
    entry.bins = bins;

    if (decoder == Decoder::ML) {
      DecodeOutcome outcome;
      outcome.decoded.resize(view.m);
      bool all_correct = true;
      for (int j = 0; j < view.m; ++j) {
        outcome.decoded[j] = ml_decode(view, inv, bins, strings, j);
        all_correct = all_correct && outcome.decoded[j] == true_index;
      }
      outcome.eve_op = eve_op;
      if (all_correct) result.success_probability += p;
      entry.outcomes.push_back(std::move(outcome));
    } else {
      // Joint residual state over A'_1^n ... A'_m^n E^n. Per-copy weights
      // are tensored copy-major and regrouped system-major.
      ComplexMatrix w = ComplexMatrix::Ones(1, 1);
      DimProfile copy_major;
      for (int c = 0; c < n; ++c) {
        const auto& tuple = view.support[seq[c]];
        w = kron(w, base.weights.at(tuple));
        for (int s = 0; s < base.residual_profile.count(); ++s) {
          copy_major.dims.push_back(base.residual_profile.dims[s]);
          copy_major.labels.push_back(base.residual_profile.labels[s] + "#" +
                                      std::to_string(c));
        }
      }
      const int per_copy = base.residual_profile.count();
      std::vector<int> order;
      for (int s = 0; s < per_copy; ++s)
        for (int c = 0; c < n; ++c) order.push_back(c * per_copy + s);
      w = permute_subsystems(w, copy_major, order);
      DimProfile grouped;  // A'_1^n, ..., A'_m^n, E^n as merged systems
      for (int j = 0; j < view.m; ++j) {
        grouped.dims.push_back(static_cast<int>(aj_total[j]));
        grouped.labels.push_back(base.residual_profile.labels[j]);
      }
      grouped.dims.push_back(static_cast<int>(eve_total));
      grouped.labels.push_back(base.residual_profile.labels.back());

      std::vector<PgmPovm> povms;
      for (int j = 0; j < view.m; ++j)
        povms.push_back(build_pgm(view, inv, bins, strings, j, aj_total[j]));

      std::vector<size_t> pick(view.m, 0);
      std::vector<int> keep_eve = {view.m};
      while (true) {
        ComplexMatrix joint = ComplexMatrix::Ones(1, 1);
        for (int j = 0; j < view.m; ++j)
          joint = kron(joint, povms[j].elements[pick[j]]);
        joint = kron(joint, identity_matrix(static_cast<int>(eve_total)));
        ComplexMatrix block = partial_trace(joint * w, grouped, keep_eve);
        double weight = block.trace().real();
        if (weight > 1e-15) {
          DecodeOutcome outcome;
          outcome.decoded.resize(view.m);
          bool all_correct = true;
          for (int j = 0; j < view.m; ++j) {
            outcome.decoded[j] = povms[j].candidates[pick[j]];
            all_correct = all_correct && outcome.decoded[j] == true_index;
          }
          outcome.eve_op = 0.5 * (block + block.adjoint());
          if (all_correct) result.success_probability += weight;
          entry.outcomes.push_back(std::move(outcome));
        }
        int pos = view.m - 1;
        while (pos >= 0) {
          if (++pick[pos] < povms[pos].elements.size()) break;
          pick[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
    result.entries.push_back(std::move(entry));
  } while (advance(seq, static_cast<int>(view.support.size())));
  return result;
}

double FinalKeyState::total_trace() const {
  double t = 0.0;
  for (const auto& [label, block] : blocks) t += block.trace().real();
  return t;
}

double FinalKeyState::all_keys_equal_probability() const {
  double p = 0.0;
  for (const auto& [label, block] : blocks) {
    const auto& keys = label.first;
    bool equal = true;
    for (size_t j = 1; j < keys.size(); ++j)
      equal = equal && keys[j] == keys[0];
    if (equal) p += block.trace().real();
  }
  return p;
}

FinalKeyState privacy_amplify(const DecodeResult& decoded, long long key_size,
                              const UniversalHash& hash) {
  require(key_size >= 1, "privacy_amplify: invalid key size");
  require(hash.range() == key_size, "privacy_amplify: hash range mismatch");
  FinalKeyState final_state;
  final_state.key_size = key_size;
  for (const auto& entry : decoded.entries) {
    for (const auto& outcome : entry.outcomes) {
      std::vector<long long> keys(outcome.decoded.size());
      for (size_t j = 0; j < outcome.decoded.size(); ++j)
        keys[j] = hash(outcome.decoded[j]);
      auto key = std::make_pair(std::move(keys), entry.bins);
      auto [it, inserted] = final_state.blocks.emplace(key, outcome.eve_op);
      if (!inserted) it->second += outcome.eve_op;
    }
  }
  double t = final_state.total_trace();
  if (std::abs(t - 1.0) > 1e-8)
    throw InternalError("privacy_amplify: total trace " + std::to_string(t));
  return final_state;
}

double secrecy_distance(const FinalKeyState& final_state) {
  // Marginalize to (k_1, bins) blocks.
  std::map<std::pair<long long, std::vector<long long>>, ComplexMatrix> omega;
  std::map<std::vector<long long>, ComplexMatrix> averaged;
  for (const auto& [label, block] : final_state.blocks) {
    auto key = std::make_pair(label.first[0], label.second);
    auto [it, inserted] = omega.emplace(key, block);
    if (!inserted) it->second += block;
    auto [it2, inserted2] = averaged.emplace(label.second, block);
    if (!inserted2) it2->second += block;
  }
  const double inv_k = 1.0 / static_cast<double>(final_state.key_size);
  double distance = 0.0;
  for (long long k = 0; k < final_state.key_size; ++k) {
    for (const auto& [bins, total] : averaged) {
      auto it = omega.find(std::make_pair(k, bins));
      ComplexMatrix mean = inv_k * total;
      if (it == omega.end()) {
        distance += 0.5 * hermitian_eigenvalues(mean).cwiseAbs().sum();
      } else {
        distance += trace_distance(it->second, mean);
      }
    }
  }
  return distance;
}

SimulationReport run_protocol(const MultipartiteState& rho,
                              const ProtocolSpec& spec) {
  require(spec.n >= 1, "protocol: block length must be positive");
  require(spec.key_size >= 1, "protocol: key size must be positive");
  CqState base = apply_instruments(rho, spec.instruments);
  const int m = base.parties();
  require(static_cast<int>(spec.bin_counts.size()) == m,
          "protocol: need one bin count per party");
  std::vector<BinningMode> modes = spec.binning;
  if (modes.empty()) modes.assign(m, BinningMode::Random);
  require(static_cast<int>(modes.size()) == m,
          "protocol: binning mode list length mismatch");

  bool randomized = spec.hash == HashMode::Seeded;
  for (const auto& mode : modes)
    randomized = randomized || mode == BinningMode::Random;
  require(!randomized || spec.seed.has_value(),
          "protocol: seed is mandatory (randomized binning or hashing)");
  std::uint64_t seed = spec.seed.value_or(0);

  SourceView view(base, spec.n);
  for (int j = 0; j < m; ++j) {
    require(spec.bin_counts[j] >= 1, "protocol: bin count must be positive");
    require(spec.bin_counts[j] <= view.string_counts[j],
            "protocol: bin count exceeds the outcome-string space");
  }
  long long key_domain = 1;
  for (int j = 0; j < m; ++j) key_domain *= view.string_counts[j];
  require(spec.key_size <= key_domain,
          "protocol: key size exceeds the outcome-string space");

  // Hilbert budget: Eve blocks times classical decode blocks.
  long long eve_total = 1;
  for (int c = 0; c < spec.n; ++c) eve_total *= view.eve_dim;
  long long blocks = spec.key_size;
  for (long long bc : spec.bin_counts) blocks *= bc;
  check_dim(eve_total * blocks, "protocol key state");

  Rng root(seed);
  std::vector<Binning> binnings;
  for (int j = 0; j < m; ++j) {
    binnings.push_back(modes[j] == BinningMode::Random
                           ? Binning::random(view.string_counts[j],
                                             spec.bin_counts[j],
                                             root.fork("binning", j))
                           : Binning::identity(view.string_counts[j],
                                               spec.bin_counts[j]));
  }

  DecodeResult decoded = decode_omniscience(base, spec.n, binnings, spec.decoder);
  UniversalHash hash = spec.hash == HashMode::Seeded
                           ? UniversalHash::seeded(seed, spec.key_size)
                           : UniversalHash::identity(spec.key_size);
  FinalKeyState final_state = privacy_amplify(decoded, spec.key_size, hash);

  SimulationReport report;
  report.reliability = final_state.all_keys_equal_probability();
  report.secrecy = secrecy_distance(final_state);
  report.achieved_key_bits =
      std::log2(static_cast<double>(spec.key_size)) / spec.n;
  double transcript = 0.0;
  for (long long bc : spec.bin_counts)
    transcript += std::log2(static_cast<double>(bc));
  report.transcript_rate_bits = transcript / spec.n;
  report.decode_success = decoded.success_probability;
  RateRegion region = min_sum_rate(co_constraints_cq(base), m);
  report.predicted_key_rate = cq_entropy_given_eve(base) - region.optimum->sum;
  report.seed = seed;
  report.decoder = spec.decoder;
  report.key_size = spec.key_size;
  report.n = spec.n;
  return report;
}

SimulationReport direct_against_co_protocol(
    int d, int k, const std::vector<ComplexMatrix>& family_in) {
  require(d >= 1 && k >= 1, "direct protocol: d and k must be positive");
  long long ambient = 1;
  for (int i = 0; i < 3; ++i) ambient *= static_cast<long long>(d) * k;
  ambient *= static_cast<long long>(k) * k * k;
  if (ambient > (1LL << 12))
    throw BudgetError("direct protocol: ambient dimension " +
                      std::to_string(ambient) + " exceeds 2^12");
  std::vector<ComplexMatrix> family =
      family_in.empty() ? default_unitary_family(d, k) : family_in;
  require(static_cast<int>(family.size()) == k,
          "direct protocol: family must contain k unitaries");
  for (const auto& u : family) {
    require(u.rows() == d && u.cols() == d,
            "direct protocol: family dimension mismatch");
    require((u.adjoint() * u - identity_matrix(d)).cwiseAbs().maxCoeff() <= 1e-9,
            "direct protocol: family member not unitary");
  }

  const long long eve_dim = static_cast<long long>(k) * k * k;
  FinalKeyState final_state;
  final_state.key_size = d;
  double reliability = 0.0;
  const double label_weight = 1.0 / static_cast<double>(eve_dim);

  DimProfile three;
  three.dims = {d, d, d};
  three.labels = {"a", "b", "c"};
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      for (int c = 0; c < k; ++c) {
        // Encrypted registers conditioned on the labels, after everyone
        // broadcast and applied the inverse of its encryption unitary.
        ComplexMatrix undo = kron(
            kron(family[a].adjoint(), family[b].adjoint()), family[c].adjoint());
        ComplexMatrix tau = ComplexMatrix::Zero(d * d * d, d * d * d);
        for (int x = 0; x < d; ++x) {
          ComplexVector v =
              kron(kron(family[a].col(x), family[b].col(x)), family[c].col(x));
          tau.noalias() += (1.0 / d) * (v * v.adjoint());
        }
        ComplexMatrix rotated = undo * tau * undo.adjoint();

        long long eve_idx = (static_cast<long long>(a) * k + b) * k + c;
        ComplexMatrix eve_block =
            ComplexMatrix::Zero(eve_dim, eve_dim);
        eve_block(eve_idx, eve_idx) = 1.0;
        std::vector<long long> bins = {b, c, a};  // broadcast labels

        for (int xa = 0; xa < d; ++xa) {
          for (int xb = 0; xb < d; ++xb) {
            for (int xc = 0; xc < d; ++xc) {
              long long idx =
                  (static_cast<long long>(xa) * d + xb) * d + xc;
              double p = rotated(idx, idx).real();
              if (p <= 1e-15) continue;
              double weight = label_weight * p;
              if (xa == xb && xb == xc) reliability += weight;
              std::vector<long long> keys = {xa, xb, xc};
              auto key = std::make_pair(keys, bins);
              auto [it, inserted] =
                  final_state.blocks.emplace(key, weight * eve_block);
              if (!inserted) it->second += weight * eve_block;
            }
          }
        }
      }
    }
  }

  SimulationReport report;
  report.reliability = reliability;
  report.secrecy = secrecy_distance(final_state);
  report.achieved_key_bits = std::log2(static_cast<double>(d));
  report.transcript_rate_bits = 3.0 * std::log2(static_cast<double>(k));
  report.decode_success = reliability;
  report.key_size = d;
  report.n = 1;
  return report;
}

}  // namespace qconf
