#include "crib/core/state.hpp"

#include <numeric>
#include <stdexcept>

namespace crib {

SingleExcitationState::SingleExcitationState(std::vector<Complex> spin_amps, Complex cavity,
                                             Complex qubit)
    : amps_(std::move(spin_amps)) {
  amps_.push_back(cavity);
  amps_.push_back(qubit);
}

SingleExcitationState SingleExcitationState::dicke(std::size_t n_spins) {
  SingleExcitationState s(n_spins);
  const double a = 1.0 / std::sqrt(static_cast<double>(n_spins));
  for (auto& x : s.spins()) x = a;
  return s;
}

SingleExcitationState SingleExcitationState::qubit_excited(std::size_t n_spins) {
  SingleExcitationState s(n_spins);
  s.qubit() = 1.0;
  return s;
}

SingleExcitationState SingleExcitationState::from_flat(std::vector<Complex> flat) {
  if (flat.size() < 2) throw std::invalid_argument("state needs cavity and qubit amplitudes");
  SingleExcitationState s;
  s.amps_ = std::move(flat);
  return s;
}

double state_norm(const SingleExcitationState& state) {
  double total = 0.0;
  for (const auto& a : state.flat()) total += std::norm(a);
  return total;
}

Complex symmetric_amplitude(const SingleExcitationState& state) {
  const auto spins = state.spins();
  if (spins.empty()) return 0.0;
  const Complex sum = std::accumulate(spins.begin(), spins.end(), Complex{0.0, 0.0});
  return sum / std::sqrt(static_cast<double>(spins.size()));
}

double symmetric_overlap(const SingleExcitationState& state) {
  return std::norm(symmetric_amplitude(state));
}

double spin_overlap(std::span<const Complex> pattern, const SingleExcitationState& state) {
  const auto spins = state.spins();
  if (pattern.size() != spins.size()) throw std::invalid_argument("spin_overlap: size mismatch");
  Complex sum = 0.0;
  for (std::size_t j = 0; j < spins.size(); ++j) sum += std::conj(pattern[j]) * spins[j];
  return std::norm(sum);
}

}  // namespace crib
