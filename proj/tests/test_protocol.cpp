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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qconf/errors.hpp"
#include "qconf/protocol.hpp"

using namespace qconf;

namespace {

MultipartiteState classical_corr_bit(bool with_eve_copy = false) {
  MultipartiteState s;
  if (!with_eve_copy) {
    s.matrix = 0.5 * (basis_projector(4, 0) + basis_projector(4, 3));
    s.profile.dims = {2, 2};
    s.profile.labels = {"A1", "A2"};
  } else {
    s.matrix = 0.5 * (basis_projector(8, 0) + basis_projector(8, 7));
    s.profile.dims = {2, 2, 2};
    s.profile.labels = {"A1", "A2", "E"};
    s.eve_index = 2;
  }
  return s;
}

std::vector<Instrument> basis_instruments(const MultipartiteState& s) {
  std::vector<Instrument> out;
  for (int p : s.party_subsystems())
    out.push_back(Instrument::computational_basis(s.profile.labels[p],
                                                  s.profile.dims[p]));
  return out;
}

/// Two-party source with a classical register and a quantum residual on
/// the second party: rho = (1/2) sum_x |x><x| (x) sigma_x.
MultipartiteState cq_discrimination_source() {
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  ComplexMatrix sigma0 = basis_projector(2, 0);
  ComplexMatrix sigma1 = plus * plus.adjoint();
  MultipartiteState s;
  s.matrix = 0.5 * (kron(basis_projector(2, 0), sigma0) +
                    kron(basis_projector(2, 1), sigma1));
  s.profile.dims = {2, 2};
  s.profile.labels = {"A1", "A2"};
  return s;
}

/// Independent reimplementation of the documented PRNG (SplitMix64 with
/// FNV-1a purpose forking and multiply-shift range reduction), used as the
/// fixture oracle for the random binning.
struct RefRng {
  std::uint64_t seed, state;
  explicit RefRng(std::uint64_t s) : seed(s), state(s) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }
  RefRng fork(const std::string& purpose, std::uint64_t index) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : purpose) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    RefRng sub(seed ^ h ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    sub.next();
    return sub;
  }
};

}  // namespace

TEST_CASE("iid source construction") {
  MultipartiteState corr = classical_corr_bit();
  CqState base = apply_instruments(corr, basis_instruments(corr));

  CqState one = build_iid_source(base, 1);
  CHECK(one.weights.size() == base.weights.size());
  CHECK(one.probability({0, 0}) == doctest::Approx(0.5));

  // Product probabilities: two copies of the correlated bit support all
  // four diagonal string pairs with probability 1/4 each.
  CqState two = build_iid_source(base, 2);
  CHECK(two.weights.size() == 4);
  for (int s = 0; s < 4; ++s)
    CHECK(two.probability({s, s}) == doctest::Approx(0.25));
  CHECK(two.outcome_alphabets[0] ==
        std::vector<std::string>{"00", "01", "10", "11"});

  // Single-party biased source, n = 3: the string (0,1,1) carries
  // 0.25 * 0.75 * 0.75.
  MultipartiteState biased;
  biased.matrix = ComplexMatrix::Zero(2, 2);
  biased.matrix(0, 0) = 0.25;
  biased.matrix(1, 1) = 0.75;
  biased.profile.dims = {2};
  biased.profile.labels = {"A1"};
  CqState b3 = build_iid_source(
      apply_instruments(biased, basis_instruments(biased)), 3);
  CHECK(b3.probability({0b011}) == doctest::Approx(0.140625).epsilon(1e-12));
}

TEST_CASE("binning: identity, constant, and the seeded fixture") {
  Binning inj = Binning::identity(8, 8);
  for (long long s = 0; s < 8; ++s) CHECK(inj(s) == s);

  Binning constant = Binning::identity(8, 1);
  for (long long s = 0; s < 8; ++s) CHECK(constant(s) == 0);
  CHECK(constant.inverse()[0].size() == 8);

  // Random binning, seed 7, |X| = 2, n = 3 (domain 8), 4 bins: the oracle
  // replays the documented PRNG independently.
  auto binnings = random_binning({8}, {4}, 7);
  RefRng ref = RefRng(7).fork("binning", 0);
  for (long long s = 0; s < 8; ++s)
    CHECK(binnings[0](s) == static_cast<long long>(ref.below(4)));
  long long total = 0;
  for (const auto& bin : binnings[0].inverse()) total += bin.size();
  CHECK(total == 8);
}

TEST_CASE("omniscience decoding: correlated sources") {
  MultipartiteState corr = classical_corr_bit();
  CqState base = apply_instruments(corr, basis_instruments(corr));

  for (int n : {1, 2, 3}) {
    long long domain = 1LL << n;
    // One player broadcasts everything, the other stays silent.
    std::vector<Binning> binnings = {Binning::identity(domain, domain),
                                     Binning::identity(domain, 1)};
    DecodeResult result = decode_omniscience(base, n, binnings, Decoder::ML);
    CHECK(result.success_probability == doctest::Approx(1.0));
  }

  // Fully correlated three-party source: everyone already knows the
  // string, so binning cannot matter.
  MultipartiteState ghz = example_ghz(3, 2);
  CqState gbase = apply_instruments(ghz, basis_instruments(ghz));
  auto binnings = random_binning({4, 4, 4}, {2, 2, 2}, 3);
  DecodeResult g = decode_omniscience(gbase, 2, binnings, Decoder::ML);
  CHECK(g.success_probability == doctest::Approx(1.0));
}

TEST_CASE("omniscience decoding: the uninformed adversarial case") {
  MultipartiteState indep;
  indep.matrix = 0.25 * identity_matrix(4);
  indep.profile.dims = {2, 2};
  indep.profile.labels = {"A1", "A2"};
  CqState base = apply_instruments(indep, basis_instruments(indep));

  for (int n : {1, 2}) {
    long long domain = 1LL << n;
    std::vector<Binning> binnings = {Binning::identity(domain, 1),
                                     Binning::identity(domain, 1)};
    DecodeResult result = decode_omniscience(base, n, binnings, Decoder::ML);

    // Exhaustive oracle: with no information all candidates tie, the
    // lexicographic rule picks string 0 for the unknown party, so the
    // joint decode succeeds exactly on the all-zero tuple.
    double oracle = 1.0;
    for (int j = 0; j < 2 * n; ++j) oracle *= 0.5;
    oracle = oracle;  // p(all-zero tuple) = (1/2)^(n m)
    CHECK(result.success_probability == doctest::Approx(oracle).epsilon(1e-12));

    // Reliability with a two-value key and mod hashing, enumerated by hand:
    // player 1 decodes (s1, 0), player 2 decodes (0, s2); the tuple
    // indices are s1 * 2^n and s2, so the keys agree iff s2 mod 2 equals
    // (s1 * 2^n) mod 2 = 0.
    FinalKeyState final_state =
        privacy_amplify(result, 2, UniversalHash::identity(2));
    double expected = 0.0;
    for (long long s1 = 0; s1 < domain; ++s1)
      for (long long s2 = 0; s2 < domain; ++s2)
        if (((s1 * domain) % 2) == (s2 % 2))
          expected += 1.0 / static_cast<double>(domain * domain);
    CHECK(final_state.all_keys_equal_probability() ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("joint-measurement decoding with quantum side information") {
  // Player 2 keeps its half of a classically correlated pair; its two
  // conditional residuals are orthogonal, so the square-root measurement
  // discriminates them perfectly.
  MultipartiteState corr = classical_corr_bit();
  std::vector<Instrument> keep_second = {Instrument::computational_basis("A1", 2),
                                         Instrument::trivial("A2", 2)};
  CqState base = apply_instruments(corr, keep_second);
  std::vector<Binning> blind = {Binning::identity(2, 1), Binning::identity(1, 1)};
  DecodeResult result = decode_omniscience(base, 1, blind, Decoder::PGM);
  CHECK(result.success_probability == doctest::Approx(1.0).epsilon(1e-10));

  // Nonorthogonal residuals |0> and |+>: the square-root measurement
  // success probability, computed directly from the 2x2 ensemble.
  MultipartiteState cq = cq_discrimination_source();
  CqState base2 = apply_instruments(cq, keep_second);
  DecodeResult pgm = decode_omniscience(base2, 1, blind, Decoder::PGM);

  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  ComplexMatrix sigma0 = 0.5 * basis_projector(2, 0);
  ComplexMatrix sigma1 = 0.5 * (plus * plus.adjoint());
  ComplexMatrix gram = sigma0 + sigma1;
  EigenSystem es = hermitian_eigen(gram);
  RealVector inv(es.values.size());
  for (int i = 0; i < 2; ++i) inv[i] = 1.0 / std::sqrt(es.values[i]);
  ComplexMatrix root = es.vectors * inv.asDiagonal() * es.vectors.adjoint();
  double expected =
      ((root * sigma0 * root * sigma0).trace().real() +
       (root * sigma1 * root * sigma1).trace().real());
  CHECK(pgm.success_probability == doctest::Approx(expected).epsilon(1e-10));
  CHECK(pgm.success_probability > 0.5);
  CHECK(pgm.success_probability < 1.0);

  // Broadcasting the bit makes the measurement unnecessary.
  std::vector<Binning> open = {Binning::identity(2, 2), Binning::identity(1, 1)};
  CHECK(decode_omniscience(base2, 1, open, Decoder::PGM).success_probability ==
        doctest::Approx(1.0).epsilon(1e-10));

  // Two copies: orthogonal residual blocks across candidates, so the joint
  // measurement still decodes perfectly. Exercises the copy-to-system
  // regrouping of the block residuals.
  std::vector<Binning> blind2 = {Binning::identity(4, 1), Binning::identity(1, 1)};
  DecodeResult two = decode_omniscience(base, 2, blind2, Decoder::PGM);
  CHECK(two.success_probability == doctest::Approx(1.0).epsilon(1e-10));
  FinalKeyState fks = privacy_amplify(two, 4, UniversalHash::identity(4));
  CHECK(std::abs(fks.total_trace() - 1.0) < 1e-10);
  CHECK(fks.all_keys_equal_probability() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("privacy amplification and secrecy") {
  // Trivial key: always secret.
  MultipartiteState corr = classical_corr_bit();
  ProtocolSpec spec;
  spec.instruments = basis_instruments(corr);
  spec.n = 1;
  spec.bin_counts = {1, 1};
  spec.binning = {BinningMode::Identity, BinningMode::Identity};
  spec.key_size = 1;
  spec.hash = HashMode::Identity;
  SimulationReport trivial = run_protocol(corr, spec);
  CHECK(trivial.reliability == doctest::Approx(1.0));
  CHECK(trivial.secrecy == doctest::Approx(0.0));

  // Perfect key from the correlated bit: uniform and decoupled.
  spec.key_size = 2;
  SimulationReport perfect = run_protocol(corr, spec);
  CHECK(perfect.reliability == doctest::Approx(1.0));
  CHECK(perfect.secrecy <= 1e-10);
  CHECK(perfect.achieved_key_bits == doctest::Approx(1.0));

  // Eve holds a copy: the key is perfectly distinguishable on average.
  MultipartiteState leaky = classical_corr_bit(true);
  ProtocolSpec spy = spec;
  spy.instruments = basis_instruments(leaky);
  SimulationReport exposed = run_protocol(leaky, spy);
  CHECK(exposed.reliability == doctest::Approx(1.0));
  CHECK(exposed.secrecy == doctest::Approx(0.5));  // 1 - 1/|K|

  spy.key_size = 1;
  CHECK(run_protocol(leaky, spy).secrecy == doctest::Approx(0.0));
}

TEST_CASE("protocol runs: operating point of the correlated-bit source") {
  // Transcript rate zero and key size 2^n: reliability 1 and secrecy 0
  // for every n up to 6 (the mod hash is injective on the diagonal).
  MultipartiteState corr = classical_corr_bit();
  for (int n = 1; n <= 6; ++n) {
    ProtocolSpec spec;
    spec.instruments = basis_instruments(corr);
    spec.n = n;
    spec.bin_counts = {1, 1};
    spec.binning = {BinningMode::Identity, BinningMode::Identity};
    spec.key_size = 1LL << n;
    spec.hash = HashMode::Identity;
    SimulationReport report = run_protocol(corr, spec);
    CHECK(report.reliability == doctest::Approx(1.0));
    CHECK(report.secrecy <= 1e-10);
    CHECK(report.achieved_key_bits == doctest::Approx(1.0));
    CHECK(report.transcript_rate_bits == doctest::Approx(0.0));
    CHECK(*report.predicted_key_rate == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("reruns with the same seed are bit-identical") {
  MultipartiteState ghz = example_ghz(3, 2);
  ProtocolSpec spec;
  spec.instruments = basis_instruments(ghz);
  spec.n = 2;
  spec.bin_counts = {2, 2, 2};
  spec.key_size = 4;
  spec.seed = 17;
  SimulationReport a = run_protocol(ghz, spec);
  SimulationReport b = run_protocol(ghz, spec);
  CHECK(a.reliability == b.reliability);
  CHECK(a.secrecy == b.secrecy);
  CHECK(a.decode_success == b.decode_success);

  ProtocolSpec unseeded = spec;
  unseeded.seed.reset();
  CHECK_THROWS_AS(run_protocol(ghz, unseeded), InputError);
}

TEST_CASE("secrecy never decreases under finer hashing") {
  // Fixed family: partial Eve correlation, mod hashing with nested key
  // sizes 1 | 2 | 4.
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  MultipartiteState partial;
  partial.matrix =
      0.5 * (kron(basis_projector(4, 0), basis_projector(2, 0)) +
             kron(basis_projector(4, 3), ComplexMatrix(plus * plus.adjoint())));
  partial.profile.dims = {2, 2, 2};
  partial.profile.labels = {"A1", "A2", "E"};
  partial.eve_index = 2;

  double previous = -1.0;
  for (long long key : {1, 2, 4}) {
    ProtocolSpec spec;
    spec.instruments = basis_instruments(partial);
    spec.n = 2;
    spec.bin_counts = {1, 1};
    spec.binning = {BinningMode::Identity, BinningMode::Identity};
    spec.key_size = key;
    spec.hash = HashMode::Identity;
    SimulationReport report = run_protocol(partial, spec);
    CHECK(report.secrecy >= previous - 1e-12);
    previous = report.secrecy;
  }
}

TEST_CASE("blockwise secrecy equals the monolithic trace distance") {
  // Assemble the full classical-quantum matrix over K1, the transcript
  // labels and Eve, and compare with the blockwise figure.
  auto monolithic = [](const FinalKeyState& final_state) {
    std::map<std::vector<long long>, int> bin_index;
    for (const auto& [label, block] : final_state.blocks)
      bin_index.emplace(label.second, 0);
    int count = 0;
    for (auto& [bins, index] : bin_index) index = count++;
    const long long k = final_state.key_size;
    long long eve_dim = final_state.blocks.begin()->second.rows();
    long long dim = k * count * eve_dim;
    ComplexMatrix omega = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix marginal = ComplexMatrix::Zero(count * eve_dim, count * eve_dim);
    for (const auto& [label, block] : final_state.blocks) {
      long long k1 = label.first[0];
      long long l = bin_index[label.second];
      omega.block(k1 * count * eve_dim + l * eve_dim,
                  k1 * count * eve_dim + l * eve_dim, eve_dim, eve_dim) += block;
      marginal.block(l * eve_dim, l * eve_dim, eve_dim, eve_dim) += block;
    }
    ComplexMatrix reference = ComplexMatrix::Zero(dim, dim);
    for (long long k1 = 0; k1 < k; ++k1)
      reference.block(k1 * count * eve_dim, k1 * count * eve_dim,
                      count * eve_dim, count * eve_dim) = marginal / double(k);
    return trace_distance(omega, reference);
  };

  MultipartiteState leaky = classical_corr_bit(true);
  for (long long key : {2, 4}) {
    ProtocolSpec spec;
    spec.instruments = basis_instruments(leaky);
    spec.n = 2;
    spec.bin_counts = {2, 1};
    spec.key_size = key;
    spec.seed = 5;
    CqState base = apply_instruments(leaky, spec.instruments);
    auto binnings = random_binning({4, 4}, spec.bin_counts, *spec.seed);
    DecodeResult decoded = decode_omniscience(base, 2, binnings, Decoder::ML);
    FinalKeyState final_state =
        privacy_amplify(decoded, key, UniversalHash::seeded(*spec.seed, key));
    CHECK(std::abs(final_state.total_trace() - 1.0) < 1e-8);
    CHECK(secrecy_distance(final_state) ==
          doctest::Approx(monolithic(final_state)).epsilon(1e-9));
  }

  // Also under the joint measurement decoder with quantum residuals.
  MultipartiteState cq = cq_discrimination_source();
  std::vector<Instrument> keep_second = {Instrument::computational_basis("A1", 2),
                                         Instrument::trivial("A2", 2)};
  CqState base = apply_instruments(cq, keep_second);
  std::vector<Binning> blind = {Binning::identity(2, 1), Binning::identity(1, 1)};
  DecodeResult decoded = decode_omniscience(base, 1, blind, Decoder::PGM);
  FinalKeyState final_state =
      privacy_amplify(decoded, 2, UniversalHash::identity(2));
  CHECK(std::abs(final_state.total_trace() - 1.0) < 1e-8);
  CHECK(secrecy_distance(final_state) ==
        doctest::Approx(monolithic(final_state)).epsilon(1e-9));
}

TEST_CASE("budget enforcement on the simulated key state") {
  MultipartiteState wide;
  wide.matrix = 0.5 * (kron(kron(basis_projector(2, 0), basis_projector(2, 0)),
                            basis_projector(4, 0)) +
                       kron(kron(basis_projector(2, 1), basis_projector(2, 1)),
                            basis_projector(4, 3)));
  wide.profile.dims = {2, 2, 4};
  wide.profile.labels = {"A1", "A2", "E"};
  wide.eve_index = 2;
  ProtocolSpec spec;
  spec.instruments = basis_instruments(wide);
  spec.n = 5;
  spec.bin_counts = {1, 1};
  spec.binning = {BinningMode::Identity, BinningMode::Identity};
  spec.key_size = 32;
  spec.hash = HashMode::Identity;
  CHECK_THROWS_AS(run_protocol(wide, spec), BudgetError);
}

TEST_CASE("direct protocol on the encrypted example") {
  SimulationReport plain = direct_against_co_protocol(2, 1);
  CHECK(plain.reliability == doctest::Approx(1.0));
  CHECK(plain.secrecy <= 1e-10);
  CHECK(plain.achieved_key_bits == doctest::Approx(1.0));
  CHECK(plain.transcript_rate_bits == doctest::Approx(0.0));

  SimulationReport qubit = direct_against_co_protocol(2, 2);
  CHECK(qubit.reliability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qubit.secrecy <= 1e-9);
  CHECK(qubit.achieved_key_bits == doctest::Approx(1.0));
  CHECK(qubit.transcript_rate_bits == doctest::Approx(3.0));

  SimulationReport quart = direct_against_co_protocol(4, 2);
  CHECK(quart.reliability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quart.secrecy <= 1e-9);
  CHECK(quart.achieved_key_bits == doctest::Approx(2.0));

  CHECK_THROWS_AS(direct_against_co_protocol(8, 2), BudgetError);
}
