#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddp {

enum class ErrorKind {
    InvalidInput,
    DimensionMismatch,
    BoundarySpectrum,
    NotInvariant,
    FixedSpectrumOutsideRegion,
    NotStabilizablePair,
    NoSolution,
    AllSingular,
    WellPosednessViolated,
    NotWellPosed,
    Infeasible,
    WellPosednessObstruction,
    CertificateFailed,
    NumericalFailure,
    SampleTooCloseToPole,
    ContinuousNotSupported,
    GenerationFailed,
    ParseError,
    ShapeError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BoundarySpectrum: return "BoundarySpectrum";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::FixedSpectrumOutsideRegion: return "FixedSpectrumOutsideRegion";
    case ErrorKind::NotStabilizablePair: return "NotStabilizablePair";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::AllSingular: return "AllSingular";
    case ErrorKind::WellPosednessViolated: return "WellPosednessViolated";
    case ErrorKind::NotWellPosed: return "NotWellPosed";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::WellPosednessObstruction: return "WellPosednessObstruction";
    case ErrorKind::CertificateFailed: return "CertificateFailed";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SampleTooCloseToPole: return "SampleTooCloseToPole";
    case ErrorKind::ContinuousNotSupported: return "ContinuousNotSupported";
    case ErrorKind::GenerationFailed: return "GenerationFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ShapeError: return "ShapeError";
    }
    return "Unknown";
}

/// Exception type used throughout the library. `residual` and `eigenvalues`
/// carry diagnostics for NotInvariant / FixedSpectrumOutsideRegion style errors.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double residual = 0.0,
          std::vector<std::complex<double>> eigenvalues = {})
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
        , residual_(residual)
        , eigenvalues_(std::move(eigenvalues))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }
    const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }

private:
    ErrorKind kind_;
    double residual_;
    std::vector<std::complex<double>> eigenvalues_;
};

namespace detail {

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) throw Error(kind, what);
}

}  // namespace detail
}  // namespace ddp
