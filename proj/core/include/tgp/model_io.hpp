#ifndef TGP_MODEL_IO_HPP
#define TGP_MODEL_IO_HPP

#include <string>

#include "tgp/model.hpp"

namespace tgp {

/// Writes the fitted model to a versioned binary file. Frequencies and phases
/// are not stored; they are regenerated from the recorded seed on load and
/// verified against a stored checksum.
void save_model(const TgpModel& model, const std::string& path);

/// Throws IoError on format or checksum mismatch.
TgpModel load_model(const std::string& path);

}  // namespace tgp

#endif
