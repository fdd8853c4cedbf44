#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "tnt/cp.hpp"
#include "tnt/qtt.hpp"
#include "tnt/tensor.hpp"
#include "tnt/tt.hpp"
#include "tnt/tucker.hpp"

namespace tnt {

/// Distinct failure categories for the binary container formats.
enum class IoCode {
    open_failed,
    bad_magic,
    bad_version,
    bad_tag,
    truncated,
    overflow,
    rank_chain,
};

class IoError : public std::runtime_error {
public:
    IoError(IoCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    IoCode code() const { return code_; }

private:
    IoCode code_;
};

// --- .dt: dense tensors -------------------------------------------------------
// magic "DTEN" | u32 version | u32 order | u64 dims[order] | f64 payload
// (all integers and doubles little-endian, payload in little-endian
// multi-index order).

void write_dense(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_dense(const std::filesystem::path& path);

// --- .tnz: compressed networks --------------------------------------------------
// magic "TNET" | u32 version | u32 format tag | original shape |
// optional quantization plan | f64 eps (relative, as requested) |
// per-core records (u32 order, u64 dims[], f64 payload).

enum class TnzFormat : std::uint32_t { cp = 1, tucker = 2, tt = 3, mpo = 4, tc = 5 };

struct TnzContainer {
    TnzFormat format = TnzFormat::tt;
    Shape original_shape;                  // dense shape this file represents
    std::optional<QuantizationPlan> plan;  // present for QTT-style contents
    double eps = 0.0;                      // relative accuracy recorded at write time
    std::variant<KruskalTensor, TuckerTensor, TTTensor, TTMatrix, TCTensor> payload{
        TTTensor({DenseTensor(Shape{1, 1, 1})})};
};

void write_tnz(const std::filesystem::path& path, const TnzContainer& c);
TnzContainer read_tnz(const std::filesystem::path& path);

/// Reconstruct the dense tensor a container represents (undoing any
/// quantization).
DenseTensor tnz_densify(const TnzContainer& c);

const char* tnz_format_name(TnzFormat f);

}  // namespace tnt
