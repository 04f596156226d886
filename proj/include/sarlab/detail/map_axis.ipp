#pragma once

namespace sarlab {

template <typename Fn>
ComplexArray map_axis(const ComplexArray& in, Index axis, Index out_len, Fn fn) {
    std::vector<Index> out_shape = in.shape;
    out_shape[static_cast<std::size_t>(axis)] = out_len;
    ComplexArray out(out_shape);

    const Index in_len = in.shape[static_cast<std::size_t>(axis)];
    const Index in_stride = in.stride(axis);
    const Index out_stride = out.stride(axis);
    // Lines are enumerated by (outer, inner) where inner spans the axes after `axis`.
    const Index inner = in_stride;
    const Index outer = in_len == 0 ? 0 : in.size() / (in_len * inner);
    const Index lines = outer * inner;

#pragma omp parallel firstprivate(fn)
    {
        Eigen::VectorXcd src(in_len);
        Eigen::VectorXcd dst(out_len);
#pragma omp for schedule(static)
        for (Index line = 0; line < lines; ++line) {
            const Index o = line / inner;
            const Index i = line % inner;
            const Index in_base = o * in_len * inner + i;
            const Index out_base = o * out_len * inner + i;
            for (Index t = 0; t < in_len; ++t) src[t] = in.data[in_base + t * in_stride];
            fn(src, dst);
            for (Index t = 0; t < out_len; ++t) out.data[out_base + t * out_stride] = dst[t];
        }
    }
    return out;
}

}  // namespace sarlab
