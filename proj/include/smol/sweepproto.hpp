#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smol/errors.hpp"
#include "smol/soilchan.hpp"

namespace smol::sweepproto {

inline constexpr int kMinTxPowerDbm = 5;
inline constexpr int kMaxTxPowerDbm = 23;

// Frame layout (7 bytes):
//   [0] magic 0x53  [1] version 0x01  [2..3] device_id big-endian
//   [4] sequence    [5] tx_power (int8) [6] XOR of bytes 0..5
inline constexpr std::size_t kFrameSize = 7;
inline constexpr std::uint8_t kMagic = 0x53;
inline constexpr std::uint8_t kVersion = 0x01;

using Frame = std::array<std::uint8_t, kFrameSize>;

struct SweepPacket {
  std::uint16_t device_id = 0;
  std::uint8_t sequence = 0;
  std::int8_t tx_power_dbm = kMinTxPowerDbm;

  friend bool operator==(const SweepPacket&, const SweepPacket&) = default;
};

enum class FrameStatus { Ok, BadLength, BadMagic, BadVersion, BadChecksum, PowerOutOfRange };

std::string_view to_string(FrameStatus status);

class FrameError : public ValidationError {
 public:
  explicit FrameError(FrameStatus status)
      : ValidationError(std::string("frame rejected: ") + std::string(to_string(status))),
        status_(status) {}
  FrameStatus status() const { return status_; }

 private:
  FrameStatus status_;
};

/// Throws FrameError(PowerOutOfRange) for tx power outside [5, 23].
Frame encode_packet(const SweepPacket& packet);

/// Non-throwing decode; `out` is written only on FrameStatus::Ok.
FrameStatus try_decode_packet(std::span<const std::uint8_t> bytes, SweepPacket& out);

/// Throws FrameError carrying the rejection reason.
SweepPacket decode_packet(std::span<const std::uint8_t> bytes);

/// Ordered, duplicate-free list of transmit powers to sweep.
class PowerPlan {
 public:
  /// 5..22 dBm: 18 levels. 23 dBm is left out because the radio wraps it to 5.
  PowerPlan();
  explicit PowerPlan(std::vector<int> levels);

  const std::vector<int>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<int> levels_;
};

/// Lower median of the plan's levels.
int median_power(const PowerPlan& plan);
int median_power(std::span<const int> levels);

/// One received packet as logged by the receiver.
struct Measurement {
  std::int64_t timestamp = 0;  // unix seconds
  std::uint16_t device_id = 0;
  int tx_power_dbm = 0;
  double rssi_dbm = 0.0;
  double height_cm = 0.0;
  double depth_cm = 0.0;
  std::string scenario;
  std::optional<double> vwc_truth_pct;  // training mode only

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Emits one frame per plan level, sequence numbers counting from 0.
class TransmitterFsm {
 public:
  enum class State { Idle, Sweeping, Done };

  TransmitterFsm(std::uint16_t device_id, PowerPlan plan);

  State state() const { return state_; }
  /// Next frame to broadcast, or nullopt once the sweep is complete.
  std::optional<Frame> next();

 private:
  std::uint16_t device_id_;
  PowerPlan plan_;
  std::size_t index_ = 0;
  State state_ = State::Idle;
};

/// Metadata the receiver attaches to every logged packet.
struct ScenarioTag {
  std::string label;
  double height_cm = 0.0;
  double depth_cm = 0.0;
  std::int64_t timestamp = 0;
  std::optional<double> vwc_truth_pct;
};

class ReceiverFsm {
 public:
  explicit ReceiverFsm(ScenarioTag tag) : tag_(std::move(tag)) {}

  /// Decodes and logs a delivered frame; corrupt frames are counted and dropped.
  /// Returns the decode status.
  FrameStatus on_frame(std::span<const std::uint8_t> bytes, double rssi_dbm);

  const std::vector<Measurement>& log() const { return log_; }
  std::vector<Measurement> take_log() { return std::move(log_); }
  std::size_t rejected() const { return rejected_; }

 private:
  ScenarioTag tag_;
  std::vector<Measurement> log_;
  std::size_t rejected_ = 0;
};

/// Simulated over-the-air path between the two state machines.
struct SimulatedLink {
  soilchan::SoilState soil;
  soilchan::LinkGeometry geometry;
  soilchan::NoiseModel noise = soilchan::NoiseModel::none();
  double drop_probability = 0.0;
  /// Emulate the radio treating a 23 dBm request as 5 dBm.
  bool wrap_23_to_5 = false;
  ScenarioTag tag;
};

struct SweepResult {
  std::vector<Measurement> measurements;
  std::size_t dropped = 0;   // lost on the air
  std::size_t rejected = 0;  // delivered but failed decode
};

/// Runs transmitter and receiver in lockstep over the link.
SweepResult run_sweep(std::uint16_t device_id, const PowerPlan& plan, const SimulatedLink& link);

}  // namespace smol::sweepproto
