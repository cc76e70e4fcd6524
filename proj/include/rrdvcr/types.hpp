#pragma once

#include <compare>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace rrdvcr {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Hop distance to the sink; std::nullopt means the node never heard an ADV.
using Height = std::optional<std::uint32_t>;

inline constexpr Height kUnreachable = std::nullopt;

/// Energy stored as integer picojoules. Debits and credits are exact, so the
/// run-level ledger (initial - residual == sum of charges) holds with ==.
class Energy {
public:
  constexpr Energy() = default;

  static constexpr Energy picojoules(std::int64_t pj) { return Energy{pj}; }

  static Energy joules(double j) {
    if (!std::isfinite(j)) {
      throw std::invalid_argument("energy must be finite");
    }
    return Energy{static_cast<std::int64_t>(std::llround(j * 1e12))};
  }

  constexpr std::int64_t pj() const { return m_pj; }
  constexpr double as_joules() const { return static_cast<double>(m_pj) * 1e-12; }
  constexpr double as_millijoules() const { return static_cast<double>(m_pj) * 1e-9; }

  constexpr Energy& operator+=(Energy o) { m_pj += o.m_pj; return *this; }
  constexpr Energy& operator-=(Energy o) { m_pj -= o.m_pj; return *this; }
  friend constexpr Energy operator+(Energy a, Energy b) { return Energy{a.m_pj + b.m_pj}; }
  friend constexpr Energy operator-(Energy a, Energy b) { return Energy{a.m_pj - b.m_pj}; }
  friend constexpr Energy operator*(Energy a, std::int64_t k) { return Energy{a.m_pj * k}; }
  friend constexpr auto operator<=>(Energy, Energy) = default;

private:
  constexpr explicit Energy(std::int64_t pj) : m_pj(pj) {}
  std::int64_t m_pj = 0;
};

enum class Protocol { Rrdvcr, Thvr, Speed };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Rrdvcr: return "rrdvcr";
    case Protocol::Thvr: return "thvr";
    case Protocol::Speed: return "speed";
  }
  return "unknown";
}

inline Protocol parse_protocol(const std::string& s) {
  if (s == "rrdvcr") return Protocol::Rrdvcr;
  if (s == "thvr") return Protocol::Thvr;
  if (s == "speed") return Protocol::Speed;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

} // namespace rrdvcr
