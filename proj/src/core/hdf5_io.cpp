// HDF5 containers for the corpus: the canonical two-array layout and the
// single (N,H,W,2) array found in the published overlapping-pairs file.

#include <hdf5.h>

#include <array>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "chromoseg/data.hpp"
#include "chromoseg/error.hpp"

namespace chromoseg::data {
namespace {

class Handle {
 public:
  using Closer = herr_t (*)(hid_t);
  Handle(hid_t id, Closer closer) : id_(id), closer_(closer) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : id_(std::exchange(other.id_, H5I_INVALID_HID)), closer_(other.closer_) {}
  ~Handle() {
    if (id_ >= 0) closer_(id_);
  }
  hid_t get() const { return id_; }
  bool valid() const { return id_ >= 0; }

 private:
  hid_t id_;
  Closer closer_;
};

// HDF5 prints its own error stack by default; we report through exceptions.
void silence_hdf5() { H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr); }

Handle open_file(const std::filesystem::path& path) {
  silence_hdf5();
  if (!std::filesystem::exists(path)) throw IoError("dataset file not found: " + path.string());
  Handle file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  if (!file.valid()) throw IoError("not an HDF5 container: " + path.string());
  return file;
}

std::vector<hsize_t> dims_of(hid_t dataset) {
  Handle space(H5Dget_space(dataset), H5Sclose);
  const int rank = H5Sget_simple_extent_ndims(space.get());
  if (rank < 0) throw IoError("cannot query dataspace");
  std::vector<hsize_t> dims(static_cast<std::size_t>(rank));
  H5Sget_simple_extent_dims(space.get(), dims.data(), nullptr);
  return dims;
}

std::vector<std::uint8_t> read_u8(hid_t dataset, std::size_t count) {
  std::vector<std::uint8_t> buffer(count);
  if (count == 0) return buffer;
  if (H5Dread(dataset, H5T_NATIVE_UCHAR, H5S_ALL, H5S_ALL, H5P_DEFAULT, buffer.data()) < 0) {
    throw IoError("failed to read array data");
  }
  return buffer;
}

std::vector<RawSample> load_canonical(hid_t file) {
  if (H5Lexists(file, "images", H5P_DEFAULT) <= 0 || H5Lexists(file, "labels", H5P_DEFAULT) <= 0) {
    throw IoError("canonical layout requires 'images' and 'labels' arrays");
  }
  Handle images(H5Dopen2(file, "images", H5P_DEFAULT), H5Dclose);
  Handle labels(H5Dopen2(file, "labels", H5P_DEFAULT), H5Dclose);
  const auto idims = dims_of(images.get());
  const auto ldims = dims_of(labels.get());
  if (idims.size() != 3 || idims != ldims) {
    throw IoError("canonical arrays must both be N x H x W with equal shapes");
  }
  const auto n = static_cast<std::size_t>(idims[0]);
  const auto rows = static_cast<int>(idims[1]);
  const auto cols = static_cast<int>(idims[2]);
  const std::size_t plane = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const auto ibuf = read_u8(images.get(), n * plane);
  const auto lbuf = read_u8(labels.get(), n * plane);

  std::vector<RawSample> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    out[s].image = GrayImage(rows, cols);
    out[s].label = LabelMap(rows, cols);
    std::copy_n(ibuf.begin() + static_cast<std::ptrdiff_t>(s * plane), plane, out[s].image.values().begin());
    std::copy_n(lbuf.begin() + static_cast<std::ptrdiff_t>(s * plane), plane, out[s].label.values().begin());
  }
  return out;
}

std::string detect_published_array(hid_t file) {
  std::vector<std::string> candidates;
  H5G_info_t info;
  H5Gget_info(file, &info);
  for (hsize_t i = 0; i < info.nlinks; ++i) {
    const ssize_t len = H5Lget_name_by_idx(file, ".", H5_INDEX_NAME, H5_ITER_INC, i, nullptr, 0, H5P_DEFAULT);
    std::string name(static_cast<std::size_t>(len), '\0');
    H5Lget_name_by_idx(file, ".", H5_INDEX_NAME, H5_ITER_INC, i, name.data(), name.size() + 1, H5P_DEFAULT);
    H5O_info_t oinfo;
    if (H5Oget_info_by_name2(file, name.c_str(), &oinfo, H5O_INFO_BASIC, H5P_DEFAULT) < 0) continue;
    if (oinfo.type != H5O_TYPE_DATASET) continue;
    Handle ds(H5Dopen2(file, name.c_str(), H5P_DEFAULT), H5Dclose);
    const auto dims = dims_of(ds.get());
    if (dims.size() == 4 && dims[3] == 2) candidates.push_back(name);
  }
  if (candidates.size() != 1) {
    throw IoError(
        "could not auto-detect the published array (found " + std::to_string(candidates.size()) +
        " root arrays shaped N x H x W x 2); pass --published-array <name> explicitly");
  }
  return candidates.front();
}

std::vector<RawSample> load_published(hid_t file, const LoadOptions& options) {
  const std::string name =
      options.published_array.empty() ? detect_published_array(file) : options.published_array;
  if (H5Lexists(file, name.c_str(), H5P_DEFAULT) <= 0) {
    throw IoError("array '" + name + "' not present in container");
  }
  Handle ds(H5Dopen2(file, name.c_str(), H5P_DEFAULT), H5Dclose);
  const auto dims = dims_of(ds.get());
  if (dims.size() != 4) throw IoError("published array '" + name + "' is not 4-D");
  const auto slices = static_cast<int>(dims[3]);
  if (options.image_slice >= slices || options.label_slice >= slices) {
    throw IoError("requested slice outside the last axis of '" + name + "'");
  }
  const auto n = static_cast<std::size_t>(dims[0]);
  const auto rows = static_cast<int>(dims[1]);
  const auto cols = static_cast<int>(dims[2]);
  const auto buf = read_u8(ds.get(), n * static_cast<std::size_t>(rows * cols * slices));

  std::vector<RawSample> out(n);
  std::size_t at = 0;
  for (std::size_t s = 0; s < n; ++s) {
    out[s].image = GrayImage(rows, cols);
    out[s].label = LabelMap(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        out[s].image(r, c) = buf[at + static_cast<std::size_t>(options.image_slice)];
        out[s].label(r, c) = buf[at + static_cast<std::size_t>(options.label_slice)];
        at += static_cast<std::size_t>(slices);
      }
  }
  return out;
}

Handle create_file(const std::filesystem::path& path) {
  silence_hdf5();
  Handle file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose);
  if (!file.valid()) throw IoError("cannot create " + path.string());
  return file;
}

void write_u8(hid_t file, const char* name, const std::vector<hsize_t>& dims,
              const std::vector<std::uint8_t>& data) {
  Handle space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
  // No modification times, so identical inputs give identical files.
  Handle dcpl(H5Pcreate(H5P_DATASET_CREATE), H5Pclose);
  H5Pset_obj_track_times(dcpl.get(), false);
  Handle ds(H5Dcreate2(file, name, H5T_STD_U8LE, space.get(), H5P_DEFAULT, dcpl.get(), H5P_DEFAULT), H5Dclose);
  if (!ds.valid()) throw IoError(std::string("cannot create array ") + name);
  if (!data.empty() &&
      H5Dwrite(ds.get(), H5T_NATIVE_UCHAR, H5S_ALL, H5S_ALL, H5P_DEFAULT, data.data()) < 0) {
    throw IoError(std::string("cannot write array ") + name);
  }
}

void write_string_attribute(hid_t object, const char* name, const std::string& value) {
  Handle type(H5Tcopy(H5T_C_S1), H5Tclose);
  H5Tset_size(type.get(), value.size() + 1);
  Handle space(H5Screate(H5S_SCALAR), H5Sclose);
  Handle attr(H5Acreate2(object, name, type.get(), space.get(), H5P_DEFAULT, H5P_DEFAULT), H5Aclose);
  if (!attr.valid() || H5Awrite(attr.get(), type.get(), value.c_str()) < 0) {
    throw IoError(std::string("cannot write attribute ") + name);
  }
}

}  // namespace

std::vector<RawSample> load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  Handle file = open_file(path);
  std::vector<RawSample> samples = options.layout == Layout::kCanonical
                                       ? load_canonical(file.get())
                                       : load_published(file.get(), options);
  for (std::size_t i = 0; i < samples.size(); ++i) validate(samples[i], i);
  return samples;
}

void save_canonical(const std::filesystem::path& path, const std::vector<RawSample>& samples) {
  const auto rows = samples.empty() ? kRawRows : samples.front().image.rows();
  const auto cols = samples.empty() ? kRawCols : samples.front().image.cols();
  std::vector<std::uint8_t> images;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    validate(samples[i], i);
    if (samples[i].image.rows() != rows || samples[i].image.cols() != cols) {
      throw InvalidInput("sample " + std::to_string(i) + " has a different size from sample 0");
    }
    images.insert(images.end(), samples[i].image.values().begin(), samples[i].image.values().end());
    labels.insert(labels.end(), samples[i].label.values().begin(), samples[i].label.values().end());
  }
  Handle file = create_file(path);
  const std::vector<hsize_t> dims{samples.size(), static_cast<hsize_t>(rows), static_cast<hsize_t>(cols)};
  write_u8(file.get(), "images", dims, images);
  write_u8(file.get(), "labels", dims, labels);
  const nlohmann::json meta = {
      {"n", samples.size()}, {"height", rows}, {"width", cols}, {"classes", kNumClasses}};
  write_string_attribute(file.get(), "meta", meta.dump());
}

void save_published(const std::filesystem::path& path, const std::vector<RawSample>& samples,
                    const std::string& array_name) {
  const auto rows = samples.empty() ? kRawRows : samples.front().image.rows();
  const auto cols = samples.empty() ? kRawCols : samples.front().image.cols();
  std::vector<std::uint8_t> buf;
  buf.reserve(samples.size() * static_cast<std::size_t>(rows * cols * 2));
  for (const auto& s : samples)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        buf.push_back(s.image(r, c));
        buf.push_back(s.label(r, c));
      }
  Handle file = create_file(path);
  write_u8(file.get(), array_name.c_str(),
           {samples.size(), static_cast<hsize_t>(rows), static_cast<hsize_t>(cols), 2}, buf);
}

}  // namespace chromoseg::data
