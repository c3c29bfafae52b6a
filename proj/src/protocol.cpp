#include "ramat/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace ramat {

std::string to_string(Protocol protocol) {
  return protocol == Protocol::Aloha ? "aloha" : "dcf";
}

ProtocolParams ProtocolParams::dot11b_dcf(int w, int m, double payload_bits) {
  ProtocolParams p;
  p.protocol = Protocol::Dcf;
  p.min_cw = w;
  p.max_backoff_stage = m;
  p.payload_bits = payload_bits;
  p.validate();
  return p;
}

ProtocolParams ProtocolParams::dot11b_aloha(int w, double payload_bits) {
  ProtocolParams p;
  p.protocol = Protocol::Aloha;
  p.min_cw = w;
  p.max_backoff_stage = 0;
  p.payload_bits = payload_bits;
  p.validate();
  return p;
}

void ProtocolParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(min_cw >= 1, "min_cw must be >= 1");
  require(max_backoff_stage >= 0, "max_backoff_stage must be >= 0");
  require(payload_bits > 0, "payload_bits must be > 0");
  require(mac_header_bits >= 0, "mac_header_bits must be >= 0");
  require(plcp_preamble_bits >= 0, "plcp_preamble_bits must be >= 0");
  require(plcp_header_bits >= 0, "plcp_header_bits must be >= 0");
  require(ack_bits >= 0, "ack_bits must be >= 0");
  require(data_rate > 0, "data_rate must be > 0");
  require(basic_rate > 0, "basic_rate must be > 0");
  require(phy_rate > 0, "phy_rate must be > 0");
  require(empty_slot > 0, "empty_slot must be > 0");
  require(difs > 0, "difs must be > 0");
  require(sifs > 0, "sifs must be > 0");
}

FrameTimings compute_timings(const ProtocolParams& params) {
  FrameTimings t{};
  const double plcp =
      (params.plcp_preamble_bits + params.plcp_header_bits) / params.phy_rate;
  t.frame = plcp + params.mac_header_bits / params.basic_rate +
            params.payload_bits / params.data_rate;
  t.ack = plcp + params.ack_bits / params.basic_rate;
  t.success = params.difs + t.frame + params.sifs + t.ack;
  t.collision = t.success;
  t.slot_aloha = t.success;
  return t;
}

double expected_backoff_slots(double p, int w, int m) {
  if (!(p >= 0.0) || p >= 1.0)
    throw std::domain_error("expected_backoff_slots: p must be in [0, 1)");
  const double half_w = 0.5 * w;
  // Removable singularity of the geometric sum at p = 1/2.
  if (std::abs(1.0 - 2.0 * p) < 1e-9)
    return 0.5 * (2.0 + m) * half_w - 0.5;
  const double factor =
      (1.0 - p - p * std::pow(2.0 * p, m)) / (1.0 - 2.0 * p);
  return factor * half_w - 0.5;
}

}  // namespace ramat
