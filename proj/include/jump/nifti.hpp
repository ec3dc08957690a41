#pragma once

#include <string>

#include "jump/volume.hpp"

namespace jump {

// NIfTI-1, single-file .nii with optional gzip decided by a .gz suffix.
// Little-endian only; big-endian files are rejected with a clear error.
// The affine is taken from the sform when sform_code > 0, otherwise derived
// from the qform, otherwise diag(pixdim).
//
// read_volume applies scl_slope/scl_inter when slope != 0 and converts the
// payload to float32. read_labels requires (near-)integer data and stores
// int32 labels.
Volume read_volume(const std::string& path);
LabelVolume read_labels(const std::string& path);

// Writes float32 (Volume) or int32 (LabelVolume) payloads with sform_code=2,
// scl_slope=1, scl_inter=0, pixdim = column norms of the affine.
void write_nifti(const Volume& v, const std::string& path);
void write_nifti(const LabelVolume& v, const std::string& path);

}  // namespace jump
