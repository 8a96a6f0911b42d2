#pragma once

#include <stdexcept>
#include <string>

namespace dslab {

// Thrown when a configured cap (arc budget, pair budget, sieve memory
// budget) would be exceeded. The message names the cap and the CLI flag
// that raises it.
class resource_error : public std::runtime_error {
  public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input document. `location` is a JSON-pointer-like path into
// the offending document.
class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& location, const std::string& msg)
        : std::runtime_error(location + ": " + msg), location_(location) {}

    const std::string& location() const { return location_; }

  private:
    std::string location_;
};

} // namespace dslab
