#include "gpattr/catalog.hpp"

#include <algorithm>
#include <set>

#include "gpattr/error.hpp"

namespace gpattr {

EventCatalog::EventCatalog(const std::vector<TypeSpec>& types, std::string_view conversion) {
  std::set<std::string, std::less<>> seen;
  const TypeSpec* conv = nullptr;
  for (const auto& spec : types) {
    if (spec.name.empty()) throw InvalidArgument("event type with empty name");
    if (!seen.insert(spec.name).second) throw InvalidArgument("duplicate event type '" + spec.name + "'");
    if (spec.name == conversion) conv = &spec;
  }
  if (conv == nullptr) throw InvalidArgument("conversion type '" + std::string(conversion) + "' is not declared");
  if (conv->initiator != Initiator::Customer) throw InvalidArgument("conversion type must be customer-initiated");
  if (conv->channel) throw InvalidArgument("conversion type must not belong to a channel");

  std::vector<const TypeSpec*> order{conv};
  for (const auto& spec : types)
    if (&spec != conv && spec.initiator == Initiator::Customer) order.push_back(&spec);
  num_customer_ = static_cast<int>(order.size());
  for (const auto& spec : types)
    if (spec.initiator == Initiator::Firm) order.push_back(&spec);
  if (num_customer_ >= static_cast<int>(order.size()))
    throw InvalidArgument("catalog needs at least one firm-initiated type (1 <= q < p)");

  for (const auto* spec : order) {
    names_.push_back(spec->name);
    if (spec == conv) {
      channel_of_.emplace_back(std::nullopt);
      continue;
    }
    if (!spec->channel || spec->channel->empty())
      throw InvalidArgument("event type '" + spec->name + "' has no channel");
    auto it = std::find(channel_names_.begin(), channel_names_.end(), *spec->channel);
    if (it == channel_names_.end()) {
      channel_names_.push_back(*spec->channel);
      it = channel_names_.end() - 1;
    }
    channel_of_.emplace_back(static_cast<ChannelIndex>(it - channel_names_.begin()));
  }
}

std::optional<TypeIndex> EventCatalog::find_type(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<TypeIndex>(it - names_.begin());
}

TypeIndex EventCatalog::type_index(std::string_view name) const {
  if (auto e = find_type(name)) return *e;
  throw InvalidArgument("unknown event type '" + std::string(name) + "'");
}

ChannelIndex EventCatalog::channel_index(std::string_view name) const {
  auto it = std::find(channel_names_.begin(), channel_names_.end(), name);
  if (it == channel_names_.end()) throw InvalidArgument("unknown channel '" + std::string(name) + "'");
  return static_cast<ChannelIndex>(it - channel_names_.begin());
}

std::vector<TypeIndex> EventCatalog::channel_types(ChannelIndex z) const {
  std::vector<TypeIndex> out;
  for (TypeIndex e = 0; e < num_types(); ++e)
    if (channel_of(e) == z) out.push_back(e);
  return out;
}

std::vector<EventCatalog::TypeSpec> EventCatalog::specs() const {
  std::vector<TypeSpec> out;
  for (TypeIndex e = 0; e < num_types(); ++e) {
    TypeSpec spec{names_[static_cast<std::size_t>(e)], is_customer(e) ? Initiator::Customer : Initiator::Firm,
                  std::nullopt};
    if (auto z = channel_of(e)) spec.channel = channel_names_[static_cast<std::size_t>(*z)];
    out.push_back(std::move(spec));
  }
  return out;
}

TypeSet::TypeSet(int num_types, std::initializer_list<TypeIndex> members) : TypeSet(num_types) {
  for (TypeIndex e : members) insert(e);
}

TypeSet TypeSet::all(int num_types) {
  TypeSet s(num_types);
  s.mask_.assign(s.mask_.size(), true);
  return s;
}

TypeSet TypeSet::channel(const EventCatalog& catalog, ChannelIndex z) {
  TypeSet s(catalog.num_types());
  for (TypeIndex e : catalog.channel_types(z)) s.insert(e);
  return s;
}

void TypeSet::insert(TypeIndex e) {
  if (e < 0 || static_cast<std::size_t>(e) >= mask_.size()) throw InvalidArgument("type index out of range");
  mask_[static_cast<std::size_t>(e)] = true;
}

bool TypeSet::empty() const noexcept { return std::none_of(mask_.begin(), mask_.end(), [](bool b) { return b; }); }

bool Path::is_positive() const noexcept {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& ev) { return ev.type == EventCatalog::conversion(); });
}

std::vector<std::size_t> Path::conversion_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < events.size(); ++i)
    if (events[i].type == EventCatalog::conversion()) out.push_back(i);
  return out;
}

std::vector<Event> truncate_before(const Path& path, double t, const TypeSet& labels) {
  std::vector<Event> out;
  for (const auto& ev : path.events) {
    if (ev.t >= t) break;
    if (labels.contains(ev.type)) out.push_back(ev);
  }
  return out;
}

RemovalSet::RemovalSet(std::vector<std::size_t> pos, std::size_t tgt) : positions(std::move(pos)), target(tgt) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
}

bool RemovalSet::contains(std::size_t i) const noexcept {
  return std::binary_search(positions.begin(), positions.end(), i);
}

void validate_removal(const Path& path, const RemovalSet& removal, bool allow_conversions) {
  if (removal.target >= path.events.size()) throw InvalidArgument("removal target is past the end of the path");
  if (path.events[removal.target].type != EventCatalog::conversion())
    throw InvalidArgument("removal target is not a conversion event");
  for (std::size_t i : removal.positions) {
    if (i >= removal.target) throw InvalidArgument("removal set contains an event at or after the target");
    if (!allow_conversions && path.events[i].type == EventCatalog::conversion())
      throw InvalidArgument("removal set contains a conversion event");
  }
}

RemovalSet channel_removal_set(const Path& path, const EventCatalog& catalog, std::size_t target, ChannelIndex z) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < target && i < path.events.size(); ++i)
    if (catalog.channel_of(path.events[i].type) == z) pos.push_back(i);
  return RemovalSet(std::move(pos), target);
}

}  // namespace gpattr
