#pragma once
#ifndef CLICKMINE_ERROR_HPP
#define CLICKMINE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace clickmine {

enum class Errc {
    malformed_line,
    invalid_timestamp,
    bad_pattern,
    unknown_label,
    empty_ruleset,
    non_monotonic_input,
    empty_input,
    label_out_of_range,
    zero_row_without_teleport,
    no_convergence,
    k_too_large,
    empty_matrix,
    dimension_mismatch,
    unassigned_user,
    too_few_resources,
    vocabulary_mismatch,
    invalid_argument,
    io,
};

constexpr std::string_view to_string(Errc e) noexcept
{
    switch (e) {
    case Errc::malformed_line: return "MalformedLine";
    case Errc::invalid_timestamp: return "InvalidTimestamp";
    case Errc::bad_pattern: return "BadPattern";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::empty_ruleset: return "EmptyRuleset";
    case Errc::non_monotonic_input: return "NonMonotonicInput";
    case Errc::empty_input: return "EmptyInput";
    case Errc::label_out_of_range: return "LabelOutOfRange";
    case Errc::zero_row_without_teleport: return "ZeroRowWithoutTeleport";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::empty_matrix: return "EmptyMatrix";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::unassigned_user: return "UnassignedUser";
    case Errc::too_few_resources: return "TooFewResources";
    case Errc::vocabulary_mismatch: return "VocabularyMismatch";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit-code mapping) can branch on kind, not text.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message)
        , code_(code)
        , message_(message)
    {
    }

    [[nodiscard]] Errc code() const noexcept { return code_; }
    /// The message without the leading code name.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::string message_;
};

/// An Error raised inside a named pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.code(), "stage " + stage + ": " + cause.message())
        , stage_(std::move(stage))
    {
    }

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace clickmine

#endif  // CLICKMINE_ERROR_HPP
