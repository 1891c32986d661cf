#pragma once
// Core domain types shared by every module: node/channel identifiers,
// millisatoshi amounts, roles, and the error taxonomy.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace channelmesh {

// All balances, amounts and fees are integer millisatoshi.
using Msat = std::int64_t;

using NodeId = std::uint32_t;

// Stable identifier assigned when a channel is opened; never reused
// within one NetworkState.
using ChannelId = std::uint64_t;

enum class NodeRole {
  Client,
  CentralHub,
  DormantHub,
};

enum class TopologyKind {
  Complete,
  Star,
  MultiHubStar,
};

std::string to_string(NodeRole role);
std::string to_string(TopologyKind kind);

// Thrown when an argument violates a documented precondition.
class invalid_argument_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Channel bookkeeping errors.
class already_exists_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class invalid_edge_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class not_found_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A rebalance plan no longer matches the live state it was computed from.
class stale_plan_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Heartbeats must carry non-decreasing timestamps.
class invalid_time_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The brute-force oracle refuses grids above its enumeration budget.
class too_large_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// One field-level problem found while validating external input.
// `path` is a JSON-pointer-style location, e.g. "/sim/duration_s".
struct ValidationIssue {
  std::string path;
  std::string message;
};

class validation_error : public std::runtime_error {
public:
  explicit validation_error(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
  static std::string render(const std::vector<ValidationIssue>& issues);
  std::vector<ValidationIssue> issues_;
};

}  // namespace channelmesh
