#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mhaec {

enum class EventClass : std::uint8_t {
  SteadyState = 0,
  DoubleTalk = 1,
  EchoPathChange = 2,
  Repositioning = 3,
};

inline constexpr std::size_t kEventClassCount = 4;

inline constexpr std::array<EventClass, kEventClassCount> kAllEventClasses = {
    EventClass::SteadyState, EventClass::DoubleTalk, EventClass::EchoPathChange,
    EventClass::Repositioning};

inline std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::SteadyState: return "SteadyState";
    case EventClass::DoubleTalk: return "DoubleTalk";
    case EventClass::EchoPathChange: return "EchoPathChange";
    case EventClass::Repositioning: return "Repositioning";
  }
  throw std::invalid_argument("to_string: bad event class");
}

inline EventClass event_class_from_string(std::string_view s) {
  for (EventClass c : kAllEventClasses)
    if (s == to_string(c)) return c;
  throw std::invalid_argument("unknown event class '" + std::string(s) + "'");
}

}  // namespace mhaec
