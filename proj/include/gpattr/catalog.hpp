#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpattr {

using TypeIndex = int;
using ChannelIndex = int;

enum class Initiator { Customer, Firm };

/// The p event types of a study.
///
/// Types are stored in canonical order: the conversion type first (index 0),
/// then the remaining customer-initiated types, then the firm-initiated types.
/// Within each block the order of the source declaration is kept. Hence type
/// `e` is customer-initiated iff `e < num_customer()`.
class EventCatalog {
 public:
  struct TypeSpec {
    std::string name;
    Initiator initiator = Initiator::Customer;
    std::optional<std::string> channel;
  };

  EventCatalog(const std::vector<TypeSpec>& types, std::string_view conversion);

  static constexpr TypeIndex conversion() noexcept { return 0; }

  int num_types() const noexcept { return static_cast<int>(names_.size()); }
  int num_customer() const noexcept { return num_customer_; }
  int num_channels() const noexcept { return static_cast<int>(channel_names_.size()); }

  bool is_customer(TypeIndex e) const noexcept { return e >= 0 && e < num_customer_; }
  bool is_firm(TypeIndex e) const noexcept { return e >= num_customer_ && e < num_types(); }

  const std::string& type_name(TypeIndex e) const { return names_.at(static_cast<std::size_t>(e)); }
  const std::vector<std::string>& type_names() const noexcept { return names_; }
  std::optional<TypeIndex> find_type(std::string_view name) const;
  /// Throws InvalidArgument for unknown names.
  TypeIndex type_index(std::string_view name) const;

  std::optional<ChannelIndex> channel_of(TypeIndex e) const { return channel_of_.at(static_cast<std::size_t>(e)); }
  const std::string& channel_name(ChannelIndex z) const { return channel_names_.at(static_cast<std::size_t>(z)); }
  const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }
  ChannelIndex channel_index(std::string_view name) const;
  std::vector<TypeIndex> channel_types(ChannelIndex z) const;

  /// Source-style description, in canonical order.
  std::vector<TypeSpec> specs() const;

  bool operator==(const EventCatalog&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::optional<ChannelIndex>> channel_of_;
  std::vector<std::string> channel_names_;
  int num_customer_ = 0;
};

/// Membership mask over type indices.
class TypeSet {
 public:
  TypeSet() = default;
  explicit TypeSet(int num_types) : mask_(static_cast<std::size_t>(num_types), false) {}
  TypeSet(int num_types, std::initializer_list<TypeIndex> members);

  static TypeSet all(int num_types);
  static TypeSet channel(const EventCatalog& catalog, ChannelIndex z);

  bool contains(TypeIndex e) const noexcept {
    return e >= 0 && static_cast<std::size_t>(e) < mask_.size() && mask_[static_cast<std::size_t>(e)];
  }
  void insert(TypeIndex e);
  bool empty() const noexcept;

 private:
  std::vector<bool> mask_;
};

struct Event {
  double t = 0.0;
  TypeIndex type = 0;

  bool operator==(const Event&) const = default;
};

/// One customer's event stream on [0, horizon], strictly increasing in time.
struct Path {
  std::string id;
  double horizon = 0.0;
  std::vector<Event> events;

  bool is_positive() const noexcept;
  std::vector<std::size_t> conversion_positions() const;

  bool operator==(const Path&) const = default;
};

/// Events with t_i < t whose type is in `labels`, in path order.
std::vector<Event> truncate_before(const Path& path, double t, const TypeSet& labels);

/// A set of event positions on a path, scored against the conversion at `target`.
struct RemovalSet {
  std::vector<std::size_t> positions;  // sorted, unique
  std::size_t target = 0;

  RemovalSet() = default;
  RemovalSet(std::vector<std::size_t> positions, std::size_t target);

  bool contains(std::size_t i) const noexcept;
  bool empty() const noexcept { return positions.empty(); }
  std::size_t min_position() const { return positions.front(); }
};

/// Checks the RemovalSet invariants against `path`; throws InvalidArgument.
void validate_removal(const Path& path, const RemovalSet& removal, bool allow_conversions = false);

/// F^{C_z}_{t*}(D): every event of channel z strictly before the conversion at `target`.
RemovalSet channel_removal_set(const Path& path, const EventCatalog& catalog, std::size_t target,
                               ChannelIndex z);

}  // namespace gpattr
