#pragma once

#include <functional>
#include <optional>

#include "gwcp/error.hpp"

namespace gwcp::test {

template <typename Fn>
std::optional<Errc> thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace gwcp::test
