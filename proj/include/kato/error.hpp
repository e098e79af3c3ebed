#pragma once

#include <stdexcept>
#include <string>

namespace kato {

enum class Errc {
    InvalidSignature,
    NotFactorable,
    WordMismatch,
    ModeMismatch,
    NonUnitConstant,
    NonVanishingSubstituent,
    NotTwisted,
    FractionalPower,
    NonIntegerExponent,
    NonTerminating,
    Overflow,
    SingularSystem,
    ParameterMismatch,
    Indeterminate,
    InvalidField,
    InvalidInput,
};

inline const char* errc_name(Errc e) {
    switch (e) {
    case Errc::InvalidSignature: return "InvalidSignature";
    case Errc::NotFactorable: return "NotFactorable";
    case Errc::WordMismatch: return "WordMismatch";
    case Errc::ModeMismatch: return "ModeMismatch";
    case Errc::NonUnitConstant: return "NonUnitConstant";
    case Errc::NonVanishingSubstituent: return "NonVanishingSubstituent";
    case Errc::NotTwisted: return "NotTwisted";
    case Errc::FractionalPower: return "FractionalPower";
    case Errc::NonIntegerExponent: return "NonIntegerExponent";
    case Errc::NonTerminating: return "NonTerminating";
    case Errc::Overflow: return "Overflow";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::ParameterMismatch: return "ParameterMismatch";
    case Errc::Indeterminate: return "Indeterminate";
    case Errc::InvalidField: return "InvalidField";
    case Errc::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace kato
