#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bandmatch {

enum class Errc {
    dimension_mismatch,
    out_of_bounds,
    empty_model,
    empty_histogram,
    degenerate_template,
    degenerate_ratio,
    degenerate_normalization,
    empty_input,
    invalid_argument,
    unknown_label,
    orphan_entry,
    unsupported_format,
    io,
    parse,
    not_found,
};

std::string_view to_string(Errc code) noexcept;

/// All library failures are reported with this exception. The code lets
/// callers (the HTTP facade in particular) map failures without parsing
/// message text.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace bandmatch
