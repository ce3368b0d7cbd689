#pragma once

#include <memory>
#include <string>
#include <vector>

#include "misim/config.hpp"
#include "misim/coupling.hpp"
#include "misim/lumped.hpp"
#include "misim/matching.hpp"
#include "misim/multiport.hpp"
#include "misim/scenario.hpp"

namespace misim {

/// Worst reciprocity / passivity figures over every assembled Z_A.
struct ZAudit {
  double max_symmetry_error = 0.0;
  double min_passivity_ratio = 1.0;  // smallest eig of Re Z over |trace|
  long matrices = 0;

  void record(const ComplexMatrix& z);
  void merge(const ZAudit& other);
  bool ok(double symmetry_tol, double passivity_tol) const;
};

/// Result of the array receive-network design.
struct TDesign {
  LumpedNetwork network;           // same T for every array coil
  std::array<double, 3> start{};   // reactances before the search
  double objective_db = 0.0;       // mean 10 log10 SNR over x, y, z sensor axes
  double initial_objective_db = 0.0;
  bool improved = false;
  int evaluations = 0;
};

/// Everything fixed by the config and the external array: coils, their
/// coupling (expanded over all bands used), the receive T-networks, the
/// 3 dB band of one matched array coil and the uplink bin grid.
class ArrayContext {
 public:
  /// Designs the T-networks by search unless `t_reactances` is given.
  explicit ArrayContext(const Config& cfg, const std::array<double, 3>* t_reactances = nullptr);

  const Config& config() const { return cfg_; }
  const std::vector<CoilPose>& coils() const { return coils_; }
  std::size_t size() const { return coils_.size(); }
  const CouplingModel& coupling() const { return *coupling_; }
  const TDesign& t_design() const { return t_design_; }
  /// Receive bank [A, L] of the array at f.
  MatchingBank receive_bank() const;
  double band3_lo() const { return band3_lo_; }
  double band3_hi() const { return band3_hi_; }
  /// Uplink bin centers (width cfg.uplink.bin_width).
  const std::vector<double>& rate_grid() const { return rate_grid_; }
  /// Bins whose centers lie inside the 3 dB band.
  std::vector<bool> band3_mask() const;

 private:
  void design_t(const std::array<double, 3>* given);
  void find_band();

  Config cfg_;
  std::vector<CoilPose> coils_;
  std::unique_ptr<CouplingModel> coupling_;
  TDesign t_design_;
  double band3_lo_ = 0.0;
  double band3_hi_ = 0.0;
  std::vector<double> rate_grid_;
};

/// One uplink frequency bin: H (array x sensors), noise covariance K and the
/// sensors' transmit-side input impedance.
struct UplinkBin {
  double frequency = 0.0;
  ComplexMatrix h;
  ComplexMatrix k;
  ComplexMatrix z_t_in;
  bool valid = true;
  std::string error;
};

/// Array plus one set of in-body coils.
class LinkSystem {
 public:
  LinkSystem(const ArrayContext& ctx, const std::vector<CoilGeometry>& sensors,
             const std::vector<CoilGeometry>& relays = {});

  const ArrayContext& context() const { return ctx_; }
  std::size_t n_sensors() const { return n_sensors_; }
  std::size_t n_relays() const { return relay_caps_.size(); }
  const std::vector<double>& relay_capacitance() const { return relay_caps_; }

  /// Z_A with relays reduced; external coils first, then sensors.
  ComplexMatrix antenna_matrix(double f_hz) const;

  /// L networks designed at f_design against each isolated sensor coil.
  MatchingBank nominal_sensor_bank() const;
  /// L networks designed at f_design against the diagonal of the coupled Z_A
  /// (relays and the other in-body coils present).
  MatchingBank rematched_sensor_bank() const;

  /// Downlink H (sensors x array) with the generators ideally power matched
  /// at f (re-synthesized at every frequency).
  ComplexMatrix downlink_ideal_tx(double f_hz, const ComplexMatrix& za, const MatchingBank& sensor_bank) const;
  /// Uplink H (array x sensors) only, without the noise model.
  ComplexMatrix uplink_channel(double f_hz, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                               const MatchingBank& array_bank) const;
  /// ||h||^2 of sensor 0 with both ends ideally matched (alternating).
  double downlink_perfect_gain(double f_hz, const ComplexMatrix& za, int max_iters) const;

  UplinkBin uplink(double f_hz, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                   const MatchingBank& array_bank) const;

  /// Worst-case figures over all Z_A assembled by this system so far.
  const ZAudit& audit() const { return audit_; }

 private:
  Chain uplink_chain(double f_hz, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                     const MatchingBank& array_bank) const;

  const ArrayContext& ctx_;
  std::size_t n_sensors_ = 0;
  std::vector<CoilGeometry> sensor_geoms_;
  std::unique_ptr<CouplingModel> model_;  // array, sensors, relays
  std::vector<double> relay_caps_;
  mutable ZAudit audit_;
};

/// Isolated-coil transducer gain |v_L / v_oc|^2 of a coil with port impedance
/// z_coil feeding a load R through a two-port (port 1 = load side).
double coil_transducer_gain(const Eigen::Matrix2cd& net, Complex z_coil, double reference_ohms);

}  // namespace misim
