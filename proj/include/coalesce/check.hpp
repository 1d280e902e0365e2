#pragma once

#include <stdexcept>
#include <string>

namespace coalesce {

// Contract violations that must stay fatal in release builds (the proof
// machinery leans on them), as opposed to assert() which may compile out.
struct check_error : std::logic_error {
  using std::logic_error::logic_error;
};

[[noreturn]] inline void check_fail(const char* expr, const char* file, int line,
                                    const std::string& msg) {
  throw check_error(std::string(file) + ":" + std::to_string(line) + ": check failed: " +
                    expr + (msg.empty() ? "" : " — " + msg));
}

}  // namespace coalesce

#define COALESCE_CHECK(cond, msg)                                   \
  do {                                                              \
    if (!(cond)) ::coalesce::check_fail(#cond, __FILE__, __LINE__, (msg)); \
  } while (0)
