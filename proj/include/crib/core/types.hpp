#pragma once

// Shared domain types. Transfer-stage quantities are expressed in units of the
// cavity-qubit coupling G (frequencies in G, times in 1/G); all frequencies are
// detunings from the qubit transition.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace crib {

using Complex = std::complex<double>;

/// Single-excitation manifold: spin amplitudes xi_1..xi_N, then cavity, then
/// qubit, stored contiguously so the integrator can work on one flat vector.
class SingleExcitationState {
 public:
  SingleExcitationState() = default;
  explicit SingleExcitationState(std::size_t n_spins) : amps_(n_spins + 2) {}
  SingleExcitationState(std::vector<Complex> spin_amps, Complex cavity, Complex qubit);

  static SingleExcitationState dicke(std::size_t n_spins);
  static SingleExcitationState qubit_excited(std::size_t n_spins);
  static SingleExcitationState from_flat(std::vector<Complex> flat);

  std::size_t n_spins() const { return amps_.size() < 2 ? 0 : amps_.size() - 2; }

  std::span<Complex> spins() { return {amps_.data(), n_spins()}; }
  std::span<const Complex> spins() const { return {amps_.data(), n_spins()}; }
  Complex& cavity() { return amps_[n_spins()]; }
  Complex cavity() const { return amps_[n_spins()]; }
  Complex& qubit() { return amps_[n_spins() + 1]; }
  Complex qubit() const { return amps_[n_spins() + 1]; }

  std::vector<Complex>& flat() { return amps_; }
  const std::vector<Complex>& flat() const { return amps_; }

 private:
  std::vector<Complex> amps_;
};

/// N spins with per-spin detunings. `induced` is the reversible (gradient)
/// part and flips sign with the gradient; `intrinsic` is fixed.
struct SpinEnsemble {
  std::vector<double> intrinsic;
  std::vector<double> induced;
  double collective_coupling = 0.0;  // kappa * sqrt(N)

  std::size_t size() const { return induced.size(); }
  double single_spin_coupling() const {
    return size() == 0 ? 0.0 : collective_coupling / std::sqrt(static_cast<double>(size()));
  }
};

/// eta = eta_s * eta_t, with a note on where each factor came from.
struct EfficiencyReport {
  double eta_s = 1.0;
  double eta_t = 1.0;
  double eta_total = 1.0;
  std::string eta_s_source;
  std::string eta_t_source;

  static EfficiencyReport combine(double eta_s, std::string eta_s_source, double eta_t,
                                  std::string eta_t_source) {
    return {eta_s, eta_t, eta_s * eta_t, std::move(eta_s_source), std::move(eta_t_source)};
  }
};

}  // namespace crib
