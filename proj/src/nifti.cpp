#include "jump/nifti.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace jump {

static_assert(std::endian::native == std::endian::little,
              "NIfTI reader/writer assumes a little-endian host");

namespace {

#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;    // 0
  char data_type[10];         // 4
  char db_name[18];           // 14
  std::int32_t extents;       // 32
  std::int16_t session_error; // 36
  char regular;               // 38
  char dim_info;              // 39
  std::int16_t dim[8];        // 40
  float intent_p1;            // 56
  float intent_p2;            // 60
  float intent_p3;            // 64
  std::int16_t intent_code;   // 68
  std::int16_t datatype;      // 70
  std::int16_t bitpix;        // 72
  std::int16_t slice_start;   // 74
  float pixdim[8];            // 76
  float vox_offset;           // 108
  float scl_slope;            // 112
  float scl_inter;            // 116
  std::int16_t slice_end;     // 120
  char slice_code;            // 122
  char xyzt_units;            // 123
  float cal_max;              // 124
  float cal_min;              // 128
  float slice_duration;       // 132
  float toffset;              // 136
  std::int32_t glmax;         // 140
  std::int32_t glmin;         // 144
  char descrip[80];           // 148
  char aux_file[24];          // 228
  std::int16_t qform_code;    // 252
  std::int16_t sform_code;    // 254
  float quatern_b;            // 256
  float quatern_c;            // 260
  float quatern_d;            // 264
  float qoffset_x;            // 268
  float qoffset_y;            // 272
  float qoffset_z;            // 276
  float srow_x[4];            // 280
  float srow_y[4];            // 296
  float srow_z[4];            // 312
  char intent_name[16];       // 328
  char magic[4];              // 344
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

enum NiftiDatatype : std::int16_t {
  DT_UINT8 = 2,
  DT_INT16 = 4,
  DT_INT32 = 8,
  DT_FLOAT32 = 16,
  DT_FLOAT64 = 64,
  DT_UINT16 = 512,
};

bool has_gz_suffix(const std::string& path) {
  return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

// gzread handles plain files transparently, so all reads go through zlib.
std::vector<std::uint8_t> read_all_bytes(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  gzbuffer(f, 1 << 16);
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
  if (n < 0) {
    int errnum = 0;
    const char* msg = gzerror(f, &errnum);
    std::string what = msg ? msg : "gzread failure";
    gzclose(f);
    throw FormatError("failed reading " + path + ": " + what);
  }
  gzclose(f);
  return out;
}

void write_all_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "wb6");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::size_t off = 0;
    while (off < bytes.size()) {
      const unsigned chunk = unsigned(std::min<std::size_t>(bytes.size() - off, 1u << 24));
      if (gzwrite(f, bytes.data() + off, chunk) != int(chunk)) {
        gzclose(f);
        throw IoError("gzwrite failed for " + path);
      }
      off += chunk;
    }
    if (gzclose(f) != Z_OK) throw IoError("gzclose failed for " + path);
  } else {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) throw IoError("write failed for " + path);
  }
}

Eigen::Matrix4d affine_from_header(const Nifti1Header& h) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
  if (h.sform_code > 0) {
    for (int c = 0; c < 4; ++c) {
      a(0, c) = h.srow_x[c];
      a(1, c) = h.srow_y[c];
      a(2, c) = h.srow_z[c];
    }
    return a;
  }
  if (h.qform_code > 0) {
    const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
    const double aa = std::sqrt(std::max(0.0, 1.0 - b * b - c * c - d * d));
    Eigen::Matrix3d r;
    r << aa * aa + b * b - c * c - d * d, 2 * (b * c - aa * d), 2 * (b * d + aa * c),
        2 * (b * c + aa * d), aa * aa + c * c - b * b - d * d, 2 * (c * d - aa * b),
        2 * (b * d - aa * c), 2 * (c * d + aa * b), aa * aa + d * d - b * b - c * c;
    const double qfac = h.pixdim[0] < 0.0f ? -1.0 : 1.0;
    r.col(0) *= h.pixdim[1];
    r.col(1) *= h.pixdim[2];
    r.col(2) *= qfac * h.pixdim[3];
    a.block<3, 3>(0, 0) = r;
    a(0, 3) = h.qoffset_x;
    a(1, 3) = h.qoffset_y;
    a(2, 3) = h.qoffset_z;
    return a;
  }
  a(0, 0) = h.pixdim[1] != 0.0f ? h.pixdim[1] : 1.0;
  a(1, 1) = h.pixdim[2] != 0.0f ? h.pixdim[2] : 1.0;
  a(2, 2) = h.pixdim[3] != 0.0f ? h.pixdim[3] : 1.0;
  return a;
}

struct Parsed {
  std::array<int, 3> dims;
  int frames;
  Eigen::Matrix4d affine;
  std::vector<double> values;  // after scl_slope/scl_inter
};

Parsed parse_nifti(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_all_bytes(path);
  if (bytes.size() < sizeof(Nifti1Header)) throw FormatError(path + ": shorter than a NIfTI-1 header");
  Nifti1Header h{};
  std::memcpy(&h, bytes.data(), sizeof(h));

  if (h.sizeof_hdr != 348) {
    std::int32_t swapped;
    std::uint8_t raw[4] = {bytes[3], bytes[2], bytes[1], bytes[0]};
    std::memcpy(&swapped, raw, 4);
    if (swapped == 348) throw FormatError(path + ": big-endian NIfTI is not supported");
    throw FormatError(path + ": not a NIfTI-1 file (sizeof_hdr != 348)");
  }
  if (std::memcmp(h.magic, "n+1", 3) != 0 || h.magic[3] != '\0') {
    if (std::memcmp(h.magic, "ni1", 3) == 0)
      throw FormatError(path + ": two-file NIfTI (magic \"ni1\") is not supported");
    throw FormatError(path + ": bad NIfTI magic");
  }
  if (h.dim[0] < 1 || h.dim[0] > 4)
    throw FormatError(path + ": only 1..4 dimensional images supported, got dim[0]=" + std::to_string(h.dim[0]));
  std::array<int, 3> dims{1, 1, 1};
  for (int i = 0; i < std::min<int>(3, h.dim[0]); ++i) {
    if (h.dim[i + 1] < 1) throw FormatError(path + ": non-positive dim");
    dims[i] = h.dim[i + 1];
  }
  const int frames = h.dim[0] == 4 ? std::max<std::int16_t>(1, h.dim[4]) : 1;

  const std::size_t nvals = std::size_t(dims[0]) * dims[1] * dims[2] * frames;
  std::size_t elem;
  switch (h.datatype) {
    case DT_UINT8: elem = 1; break;
    case DT_INT16: elem = 2; break;
    case DT_INT32: elem = 4; break;
    case DT_FLOAT32: elem = 4; break;
    case DT_FLOAT64: elem = 8; break;
    case DT_UINT16: elem = 2; break;
    default:
      throw UnsupportedDatatype(path + ": unsupported NIfTI datatype code " + std::to_string(h.datatype));
  }
  const std::size_t offset = std::size_t(std::max(348.0f, h.vox_offset));
  if (bytes.size() < offset + nvals * elem) throw FormatError(path + ": truncated payload");

  Parsed p;
  p.dims = dims;
  p.frames = frames;
  p.affine = affine_from_header(h);
  p.values.resize(nvals);
  const std::uint8_t* src = bytes.data() + offset;
  auto load = [&](auto tag) {
    using T = decltype(tag);
    for (std::size_t i = 0; i < nvals; ++i) {
      T v;
      std::memcpy(&v, src + i * sizeof(T), sizeof(T));
      p.values[i] = double(v);
    }
  };
  switch (h.datatype) {
    case DT_UINT8: load(std::uint8_t{}); break;
    case DT_INT16: load(std::int16_t{}); break;
    case DT_INT32: load(std::int32_t{}); break;
    case DT_FLOAT32: load(float{}); break;
    case DT_FLOAT64: load(double{}); break;
    case DT_UINT16: load(std::uint16_t{}); break;
  }
  if (h.scl_slope != 0.0f && !(h.scl_slope == 1.0f && h.scl_inter == 0.0f)) {
    for (double& v : p.values) v = double(h.scl_slope) * v + double(h.scl_inter);
  }
  return p;
}

Nifti1Header make_header(const std::array<int, 3>& dims, int frames, const Eigen::Matrix4d& affine,
                         std::int16_t datatype, std::int16_t bitpix) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = std::int16_t(frames > 1 ? 4 : 3);
  h.dim[1] = std::int16_t(dims[0]);
  h.dim[2] = std::int16_t(dims[1]);
  h.dim[3] = std::int16_t(dims[2]);
  h.dim[4] = std::int16_t(frames > 1 ? frames : 1);
  for (int i = 5; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  for (int i = 0; i < 3; ++i) h.pixdim[i + 1] = float(affine.block<3, 1>(0, i).norm());
  h.pixdim[4] = frames > 1 ? 1.0f : 0.0f;
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = char(2 | (frames > 1 ? 8 : 0));  // mm, seconds when 4D
  h.qform_code = 0;
  h.sform_code = 2;
  for (int c = 0; c < 4; ++c) {
    h.srow_x[c] = float(affine(0, c));
    h.srow_y[c] = float(affine(1, c));
    h.srow_z[c] = float(affine(2, c));
  }
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

template <typename T>
std::vector<std::uint8_t> serialize(const Nifti1Header& h, const std::vector<T>& payload) {
  std::vector<std::uint8_t> bytes(352 + payload.size() * sizeof(T), 0);
  std::memcpy(bytes.data(), &h, sizeof(h));
  // 4 zero bytes at 348: no header extensions.
  std::memcpy(bytes.data() + 352, payload.data(), payload.size() * sizeof(T));
  return bytes;
}

}  // namespace

Volume read_volume(const std::string& path) {
  Parsed p = parse_nifti(path);
  Volume v;
  v.dims = p.dims;
  v.frames = p.frames;
  v.affine = p.affine;
  v.data.resize(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) v.data[i] = float(p.values[i]);
  validate(v);
  return v;
}

LabelVolume read_labels(const std::string& path) {
  Parsed p = parse_nifti(path);
  if (p.frames != 1) throw FormatError(path + ": label volumes must be 3D");
  LabelVolume lv;
  lv.dims = p.dims;
  lv.affine = p.affine;
  lv.data.resize(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double r = std::round(p.values[i]);
    if (std::abs(p.values[i] - r) > 1e-3)
      throw FormatError(path + ": non-integer value in label volume");
    if (r < 0) throw FormatError(path + ": negative label");
    lv.data[i] = std::int32_t(r);
  }
  lv.rebuild_label_set();
  validate(lv);
  return lv;
}

void write_nifti(const Volume& v, const std::string& path) {
  validate(v);
  const Nifti1Header h = make_header(v.dims, v.frames, v.affine, DT_FLOAT32, 32);
  write_all_bytes(path, serialize(h, v.data));
}

void write_nifti(const LabelVolume& v, const std::string& path) {
  validate(v);
  const Nifti1Header h = make_header(v.dims, 1, v.affine, DT_INT32, 32);
  write_all_bytes(path, serialize(h, v.data));
}

}  // namespace jump
