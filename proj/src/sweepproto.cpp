#include "smol/sweepproto.hpp"

#include <algorithm>
#include <unordered_set>

#include "smol/rng.hpp"

namespace smol::sweepproto {
namespace {

bool power_in_range(int p) { return p >= kMinTxPowerDbm && p <= kMaxTxPowerDbm; }

std::uint8_t checksum(std::span<const std::uint8_t> header) {
  std::uint8_t x = 0;
  for (const auto b : header) {
    x ^= b;
  }
  return x;
}

// Stream ids for seeds derived from the link's noise seed.
constexpr std::uint64_t kDropStream = 0x64726f70;  // "drop"

}  // namespace

std::string_view to_string(FrameStatus status) {
  switch (status) {
    case FrameStatus::Ok: return "ok";
    case FrameStatus::BadLength: return "bad length";
    case FrameStatus::BadMagic: return "bad magic";
    case FrameStatus::BadVersion: return "bad version";
    case FrameStatus::BadChecksum: return "bad checksum";
    case FrameStatus::PowerOutOfRange: return "tx power out of range";
  }
  return "unknown";
}

Frame encode_packet(const SweepPacket& packet) {
  if (!power_in_range(packet.tx_power_dbm)) {
    throw FrameError(FrameStatus::PowerOutOfRange);
  }
  Frame f{};
  f[0] = kMagic;
  f[1] = kVersion;
  f[2] = static_cast<std::uint8_t>(packet.device_id >> 8);
  f[3] = static_cast<std::uint8_t>(packet.device_id & 0xFF);
  f[4] = packet.sequence;
  f[5] = static_cast<std::uint8_t>(packet.tx_power_dbm);
  f[6] = checksum(std::span(f).first(6));
  return f;
}

FrameStatus try_decode_packet(std::span<const std::uint8_t> bytes, SweepPacket& out) {
  if (bytes.size() != kFrameSize) return FrameStatus::BadLength;
  if (bytes[0] != kMagic) return FrameStatus::BadMagic;
  if (bytes[1] != kVersion) return FrameStatus::BadVersion;
  if (checksum(bytes.first(6)) != bytes[6]) return FrameStatus::BadChecksum;
  const auto power = static_cast<std::int8_t>(bytes[5]);
  if (!power_in_range(power)) return FrameStatus::PowerOutOfRange;
  out.device_id = static_cast<std::uint16_t>((bytes[2] << 8) | bytes[3]);
  out.sequence = bytes[4];
  out.tx_power_dbm = power;
  return FrameStatus::Ok;
}

SweepPacket decode_packet(std::span<const std::uint8_t> bytes) {
  SweepPacket p;
  if (const auto s = try_decode_packet(bytes, p); s != FrameStatus::Ok) {
    throw FrameError(s);
  }
  return p;
}

PowerPlan::PowerPlan() {
  for (int p = kMinTxPowerDbm; p <= 22; ++p) {
    levels_.push_back(p);
  }
}

PowerPlan::PowerPlan(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) {
    throw ValidationError("power plan must not be empty");
  }
  if (levels_.size() > 256) {
    throw ValidationError("power plan longer than the 8-bit sequence space");
  }
  std::unordered_set<int> seen;
  for (const int p : levels_) {
    if (!power_in_range(p)) {
      throw ValidationError("power plan level " + std::to_string(p) + " dBm outside [5, 23]");
    }
    if (!seen.insert(p).second) {
      throw ValidationError("power plan repeats level " + std::to_string(p));
    }
  }
}

int median_power(std::span<const int> levels) {
  if (levels.empty()) {
    throw ValidationError("median of an empty power plan");
  }
  std::vector<int> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

int median_power(const PowerPlan& plan) { return median_power(plan.levels()); }

TransmitterFsm::TransmitterFsm(std::uint16_t device_id, PowerPlan plan)
    : device_id_(device_id), plan_(std::move(plan)) {}

std::optional<Frame> TransmitterFsm::next() {
  if (state_ == State::Done) return std::nullopt;
  state_ = State::Sweeping;
  if (index_ >= plan_.size()) {
    state_ = State::Done;
    return std::nullopt;
  }
  const SweepPacket packet{device_id_, static_cast<std::uint8_t>(index_),
                           static_cast<std::int8_t>(plan_.levels()[index_])};
  ++index_;
  return encode_packet(packet);
}

FrameStatus ReceiverFsm::on_frame(std::span<const std::uint8_t> bytes, double rssi_dbm) {
  SweepPacket packet;
  const FrameStatus status = try_decode_packet(bytes, packet);
  if (status != FrameStatus::Ok) {
    ++rejected_;
    return status;
  }
  log_.push_back(Measurement{
      .timestamp = tag_.timestamp,
      .device_id = packet.device_id,
      .tx_power_dbm = packet.tx_power_dbm,
      .rssi_dbm = rssi_dbm,
      .height_cm = tag_.height_cm,
      .depth_cm = tag_.depth_cm,
      .scenario = tag_.label,
      .vwc_truth_pct = tag_.vwc_truth_pct,
  });
  return status;
}

SweepResult run_sweep(std::uint16_t device_id, const PowerPlan& plan, const SimulatedLink& link) {
  if (!(link.drop_probability >= 0.0 && link.drop_probability <= 1.0)) {
    throw ValidationError("drop probability must lie in [0, 1]");
  }
  link.noise.validate();

  TransmitterFsm tx(device_id, plan);
  ReceiverFsm rx(link.tag);
  Rng drop_rng(derive_seed(link.noise.seed, kDropStream));
  SweepResult result;

  std::uint64_t packet_index = 0;
  while (const auto frame = tx.next()) {
    const std::uint64_t i = packet_index++;
    if (link.drop_probability > 0.0 && drop_rng.uniform() < link.drop_probability) {
      ++result.dropped;
      continue;
    }
    // The link only sees the radio's requested power, as the hardware would.
    int effective_power = static_cast<std::int8_t>((*frame)[5]);
    if (link.wrap_23_to_5 && effective_power == kMaxTxPowerDbm) {
      effective_power = kMinTxPowerDbm;
    }
    soilchan::NoiseModel noise = link.noise;
    noise.seed = derive_seed(link.noise.seed, i);
    const double rssi = soilchan::synth_rssi(effective_power, link.soil, link.geometry, noise);
    rx.on_frame(*frame, rssi);
  }
  result.rejected = rx.rejected();
  result.measurements = rx.take_log();
  return result;
}

}  // namespace smol::sweepproto
