#ifndef RAMAT_PROTOCOL_HPP
#define RAMAT_PROTOCOL_HPP

#include <string>

namespace ramat {

enum class Protocol { Aloha, Dcf };

std::string to_string(Protocol protocol);

// PHY/MAC timing and contention constants. Durations in seconds, rates in
// bits/s, frame fields in bits.
struct ProtocolParams {
  Protocol protocol = Protocol::Dcf;
  int min_cw = 32;          // W, minimum contention window in slots
  int max_backoff_stage = 5;  // m, number of doubling stages (DCF only)
  double payload_bits = 12000.0;       // L
  double mac_header_bits = 272.0;      // L_MACH
  double plcp_preamble_bits = 144.0;   // L_PLCPPre
  double plcp_header_bits = 48.0;      // L_PLCPH
  double ack_bits = 112.0;             // L_ack
  double data_rate = 11e6;             // R_data
  double basic_rate = 1e6;             // R_basic
  double phy_rate = 1e6;               // R_PHY
  double empty_slot = 20e-6;           // sigma, DCF empty slot
  double difs = 50e-6;
  double sifs = 10e-6;

  // 802.11b PHY constants with the DCF contention defaults (W=32, m=5)
  // and a 1500-byte payload.
  static ProtocolParams dot11b_dcf(int w = 32, int m = 5,
                                   double payload_bits = 12000.0);
  // Same PHY constants with slotted-Aloha contention (fixed window W).
  static ProtocolParams dot11b_aloha(int w = 32, double payload_bits = 12000.0);

  void validate() const;  // throws std::invalid_argument
};

// Frame and slot durations derived from the parameters (seconds).
struct FrameTimings {
  double frame;       // T_fra, time on air for a data frame
  double ack;         // T_ack
  double success;     // T_s = DIFS + T_fra + SIFS + T_ack
  double collision;   // T_c, equal to T_s here (no EIFS modelling)
  double slot_aloha;  // Aloha contention slot, equal to T_s
};

FrameTimings compute_timings(const ProtocolParams& params);

// Mean number of backoff slots per transmission attempt for conditional
// collision probability p, window W and stage cap m:
//   ((1 - p - p (2p)^m) / (1 - 2p)) * W/2 - 1/2,
// with the removable singularity at p = 1/2 replaced by its limit
//   ((2 + m) / 2) * W/2 - 1/2.
// Throws std::domain_error unless 0 <= p < 1.
double expected_backoff_slots(double p, int w, int m);

}  // namespace ramat

#endif  // RAMAT_PROTOCOL_HPP
