#pragma once

#include <stdexcept>
#include <string>

namespace curvedraw {

struct DepthTooSmall : std::runtime_error {
  explicit DepthTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct RaysNearParallel : std::runtime_error {
  explicit RaysNearParallel(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateCameraPair : std::runtime_error {
  explicit DegenerateCameraPair(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownView : std::runtime_error {
  explicit UnknownView(const std::string& what) : std::runtime_error(what) {}
};

struct SpacingTooLarge : std::runtime_error {
  explicit SpacingTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct MissingPrimarySupport : std::runtime_error {
  explicit MissingPrimarySupport(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSpec : std::runtime_error {
  explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyGroundTruth : std::runtime_error {
  explicit EmptyGroundTruth(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace curvedraw
