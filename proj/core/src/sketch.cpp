#include "commonsense/sketch.hpp"

#include <cstdlib>

#include "commonsense/error.hpp"

namespace commonsense {

bool Residue::is_zero() const noexcept {
  for (std::int64_t v : values)
    if (v != 0) return false;
  return true;
}

std::int64_t Residue::l1_norm() const noexcept {
  std::int64_t total = 0;
  for (std::int64_t v : values) total += std::llabs(v);
  return total;
}

Sketch empty_sketch(const MatrixSpec& spec) {
  spec.validate();
  return Sketch{spec, std::vector<std::int64_t>(spec.rows, 0), 0};
}

Sketch encode_set(const MatrixSpec& spec, std::span<const ElementId> elements) {
  return encode_set(spec, HashedColumns(spec), elements);
}

Sketch encode_set(const MatrixSpec& spec, const ColumnSource& columns,
                  std::span<const ElementId> elements) {
  if (columns.rows() != spec.rows || columns.weight() != spec.ones_per_column)
    throw Error(Errc::spec_mismatch, "column source does not match spec");
  Sketch s = empty_sketch(spec);
  std::vector<std::uint32_t> rows(spec.ones_per_column);
  for (const ElementId& e : elements) {
    columns.support(e, rows);
    for (std::uint32_t r : rows) ++s.values[r];
  }
  s.element_count = static_cast<std::int64_t>(elements.size());
  return s;
}

Sketch encode_supports(const MatrixSpec& spec, const SupportTable& supports) {
  if (supports.size() != 0 && (supports.rows() != spec.rows || supports.weight() != spec.ones_per_column))
    throw Error(Errc::spec_mismatch, "support table does not match spec");
  Sketch s = empty_sketch(spec);
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::uint32_t r : supports[i]) ++s.values[r];
  s.element_count = static_cast<std::int64_t>(supports.size());
  return s;
}

void update(Sketch& sketch, const ElementId& element, int sign) {
  update(sketch, HashedColumns(sketch.spec), element, sign);
}

void update(Sketch& sketch, const ColumnSource& columns, const ElementId& element, int sign) {
  if (sign != 1 && sign != -1) throw Error(Errc::invalid_argument, "sign must be +1 or -1");
  std::uint32_t buf[255];
  std::span<std::uint32_t> rows(buf, columns.weight());
  columns.support(element, rows);
  for (std::uint32_t r : rows) sketch.values[r] += sign;
  sketch.element_count += sign;
}

Residue residue_between(const Sketch& bob, const Sketch& alice) {
  if (!(bob.spec == alice.spec) || bob.values.size() != alice.values.size())
    throw Error(Errc::spec_mismatch, "sketches were built over different matrices");
  Residue r{bob.spec, bob.values};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= alice.values[i];
  return r;
}

Sketch add(const Sketch& a, const Sketch& b) {
  if (!(a.spec == b.spec) || a.values.size() != b.values.size())
    throw Error(Errc::spec_mismatch, "sketches were built over different matrices");
  Sketch s = a;
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] += b.values[i];
  s.element_count += b.element_count;
  return s;
}

}  // namespace commonsense
