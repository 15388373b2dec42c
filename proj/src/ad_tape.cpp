#include "cbamgrid/ad/tape.hpp"

#include <algorithm>
#include <cmath>

#include "cbamgrid/errors.hpp"

namespace cbamgrid::ad {

int Tape::push(Tensor value, std::function<void(Tape&)> back) {
    Node n;
    n.value = std::move(value);
    n.grad = Tensor::zeros(n.value.rows(), n.value.cols());
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(Tensor value) { return Var{this, push(std::move(value), nullptr)}; }

// ---------------------------------------------------------------------------

Var Tape::matmul(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    if (A.cols() != B.rows())
        raise(ErrorKind::Shape, "matmul: incompatible shapes " + A.shape_str() + " and " + B.shape_str());
    const int m = A.rows(), k = A.cols(), n = B.cols();
    Tensor C(m, n);
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const double aip = A.at(i, p);
            if (aip == 0.0) continue;
            for (int j = 0; j < n; ++j) C.at(i, j) += aip * B.at(p, j);
        }
    }
    int ai = a.id, bi = b.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, bi, out, m, k, n](Tape& t) {
        const Tensor& dC = t.grad(out);
        const Tensor& A2 = t.value(ai);
        const Tensor& B2 = t.value(bi);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        // dA += dC * B^T
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const double d = dC.at(i, j);
                if (d == 0.0) continue;
                for (int p = 0; p < k; ++p) dA.at(i, p) += d * B2.at(p, j);
            }
        // dB += A^T * dC
        for (int i = 0; i < m; ++i)
            for (int p = 0; p < k; ++p) {
                const double av = A2.at(i, p);
                if (av == 0.0) continue;
                for (int j = 0; j < n; ++j) dB.at(p, j) += av * dC.at(i, j);
            }
    };
    return Var{this, out};
}

namespace {
void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        raise(ErrorKind::Shape, std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}
}  // namespace

Var Tape::add(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    check_same_shape(A, B, "add");
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
    int ai = a.id, bi = b.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, bi, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        for (std::size_t i = 0; i < d.size(); ++i) {
            dA[i] += d[i];
            dB[i] += d[i];
        }
    };
    return Var{this, out};
}

Var Tape::sub(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    check_same_shape(A, B, "sub");
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] -= B[i];
    int ai = a.id, bi = b.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, bi, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        for (std::size_t i = 0; i < d.size(); ++i) {
            dA[i] += d[i];
            dB[i] -= d[i];
        }
    };
    return Var{this, out};
}

Var Tape::mul(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    check_same_shape(A, B, "mul");
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
    int ai = a.id, bi = b.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, bi, out](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& A2 = t.value(ai);
        const Tensor& B2 = t.value(bi);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        for (std::size_t i = 0; i < d.size(); ++i) {
            dA[i] += d[i] * B2[i];
            dB[i] += d[i] * A2[i];
        }
    };
    return Var{this, out};
}

Var Tape::scale(Var a, double c) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] *= c;
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out, c](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < d.size(); ++i) dA[i] += c * d[i];
    };
    return Var{this, out};
}

Var Tape::add_const(Var a, double c) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] += c;
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < d.size(); ++i) dA[i] += d[i];
    };
    return Var{this, out};
}

Var Tape::add_rowvec(Var a, Var row) {
    const Tensor& A = value(a.id);
    const Tensor& R = value(row.id);
    if (R.rows() != 1 || R.cols() != A.cols())
        raise(ErrorKind::Shape, "add_rowvec: row " + R.shape_str() + " does not broadcast over " + A.shape_str());
    Tensor C = A;
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < C.cols(); ++j) C.at(i, j) += R.at(0, j);
    int ai = a.id, ri = row.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, ri, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dR = t.grad_mut(ri);
        for (int i = 0; i < d.rows(); ++i)
            for (int j = 0; j < d.cols(); ++j) {
                dA.at(i, j) += d.at(i, j);
                dR.at(0, j) += d.at(i, j);
            }
    };
    return Var{this, out};
}

Var Tape::concat_rows(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    if (A.cols() != B.cols())
        raise(ErrorKind::Shape, "concat_rows: column mismatch " + A.shape_str() + " vs " + B.shape_str());
    Tensor C(A.rows() + B.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C.at(i, j) = A.at(i, j);
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j) C.at(A.rows() + i, j) = B.at(i, j);
    int ai = a.id, bi = b.id, arows = A.rows();
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, bi, arows, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        for (int i = 0; i < dA.rows(); ++i)
            for (int j = 0; j < d.cols(); ++j) dA.at(i, j) += d.at(i, j);
        for (int i = 0; i < dB.rows(); ++i)
            for (int j = 0; j < d.cols(); ++j) dB.at(i, j) += d.at(arows + i, j);
    };
    return Var{this, out};
}

Var Tape::rows(Var a, int begin, int end) {
    const Tensor& A = value(a.id);
    if (begin < 0 || end > A.rows() || begin >= end)
        raise(ErrorKind::Range, "rows: slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                    ") out of " + A.shape_str());
    Tensor C(end - begin, A.cols());
    for (int i = begin; i < end; ++i)
        for (int j = 0; j < A.cols(); ++j) C.at(i - begin, j) = A.at(i, j);
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, begin, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dA = t.grad_mut(ai);
        for (int i = 0; i < d.rows(); ++i)
            for (int j = 0; j < d.cols(); ++j) dA.at(begin + i, j) += d.at(i, j);
    };
    return Var{this, out};
}

Var Tape::leaky_relu(Var a, double slope) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i)
        if (C[i] < 0.0) C[i] *= slope;
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out, slope](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& A2 = t.value(ai);
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < d.size(); ++i) dA[i] += d[i] * (A2[i] >= 0.0 ? 1.0 : slope);
    };
    return Var{this, out};
}

Var Tape::elu(Var a) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i)
        if (C[i] < 0.0) C[i] = std::expm1(C[i]);
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& A2 = t.value(ai);
        const Tensor& C2 = t.value(out);
        Tensor& dA = t.grad_mut(ai);
        // d/dx elu = 1 for x >= 0, exp(x) = elu(x) + 1 for x < 0
        for (std::size_t i = 0; i < d.size(); ++i) dA[i] += d[i] * (A2[i] >= 0.0 ? 1.0 : C2[i] + 1.0);
    };
    return Var{this, out};
}

Var Tape::exp(Var a) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = std::exp(C[i]);
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& C2 = t.value(out);
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < d.size(); ++i) dA[i] += d[i] * C2[i];
    };
    return Var{this, out};
}

Var Tape::abs(Var a) {
    Tensor C = value(a.id);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = std::fabs(C[i]);
    int ai = a.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, out](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& A2 = t.value(ai);
        Tensor& dA = t.grad_mut(ai);
        // subgradient 0 at the kink
        for (std::size_t i = 0; i < d.size(); ++i)
            dA[i] += d[i] * (A2[i] > 0.0 ? 1.0 : (A2[i] < 0.0 ? -1.0 : 0.0));
    };
    return Var{this, out};
}

Var Tape::sum(Var a) {
    const Tensor& A = value(a.id);
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    int ai = a.id;
    int out = push(Tensor::from(1, 1, {s}), nullptr);
    nodes_[out].back = [ai, out](Tape& t) {
        const double d = t.grad(out)[0];
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += d;
    };
    return Var{this, out};
}

Var Tape::mean(Var a) {
    const Tensor& A = value(a.id);
    if (A.size() == 0) raise(ErrorKind::Contract, "mean of empty tensor");
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    const double inv_n = 1.0 / static_cast<double>(A.size());
    int ai = a.id;
    int out = push(Tensor::from(1, 1, {s * inv_n}), nullptr);
    nodes_[out].back = [ai, out, inv_n](Tape& t) {
        const double d = t.grad(out)[0] * inv_n;
        Tensor& dA = t.grad_mut(ai);
        for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += d;
    };
    return Var{this, out};
}

// ---------------------------------------------------------------------------

Var Tape::pairwise_scores(Var f, Var g, int nodes_per_block) {
    const Tensor& F = value(f.id);
    const Tensor& G = value(g.id);
    if (F.cols() != 1 || G.cols() != 1 || F.rows() != G.rows())
        raise(ErrorKind::Shape, "pairwise_scores: expected equal column vectors, got " + F.shape_str() +
                                    " and " + G.shape_str());
    const int n = nodes_per_block;
    if (n <= 0 || F.rows() % n != 0)
        raise(ErrorKind::Shape, "pairwise_scores: " + std::to_string(F.rows()) +
                                    " rows not divisible into blocks of " + std::to_string(n));
    Tensor C(F.rows(), n);
    for (int r = 0; r < F.rows(); ++r) {
        const int base = (r / n) * n;
        for (int j = 0; j < n; ++j) C.at(r, j) = F[r] + G[base + j];
    }
    int fi = f.id, gi = g.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [fi, gi, n, out](Tape& t) {
        const Tensor& d = t.grad(out);
        Tensor& dF = t.grad_mut(fi);
        Tensor& dG = t.grad_mut(gi);
        for (int r = 0; r < d.rows(); ++r) {
            const int base = (r / n) * n;
            for (int j = 0; j < n; ++j) {
                dF[r] += d.at(r, j);
                dG[base + j] += d.at(r, j);
            }
        }
    };
    return Var{this, out};
}

Var Tape::neighborhood_softmax(Var scores, const Tensor& mask) {
    const Tensor& S = value(scores.id);
    const int n = mask.rows();
    if (mask.cols() != n || S.cols() != n || S.rows() % n != 0)
        raise(ErrorKind::Shape, "neighborhood_softmax: scores " + S.shape_str() + " vs mask " + mask.shape_str());
    for (int i = 0; i < n; ++i) {
        bool any = false;
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j) != 0.0) { any = true; break; }
        if (!any) raise(ErrorKind::Mask, "empty neighborhood for node " + std::to_string(i));
    }

    Tensor A(S.rows(), n);
    for (int r = 0; r < S.rows(); ++r) {
        const int i = r % n;
        double mx = -HUGE_VAL;
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j) != 0.0) mx = std::max(mx, S.at(r, j));
        double denom = 0.0;
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j) != 0.0) denom += std::exp(S.at(r, j) - mx);
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j) != 0.0) A.at(r, j) = std::exp(S.at(r, j) - mx) / denom;
    }
    int si = scores.id;
    Tensor mask_copy = mask;
    int out = push(std::move(A), nullptr);
    nodes_[out].back = [si, out, n, mask_copy](Tape& t) {
        const Tensor& d = t.grad(out);
        const Tensor& A2 = t.value(out);
        Tensor& dS = t.grad_mut(si);
        for (int r = 0; r < d.rows(); ++r) {
            const int i = r % n;
            double dot = 0.0;
            for (int j = 0; j < n; ++j)
                if (mask_copy.at(i, j) != 0.0) dot += A2.at(r, j) * d.at(r, j);
            for (int j = 0; j < n; ++j)
                if (mask_copy.at(i, j) != 0.0) dS.at(r, j) += A2.at(r, j) * (d.at(r, j) - dot);
        }
    };
    return Var{this, out};
}

Var Tape::block_aggregate(Var attn, Var values, int nodes_per_block) {
    const Tensor& A = value(attn.id);
    const Tensor& V = value(values.id);
    const int n = nodes_per_block;
    if (A.cols() != n || A.rows() != V.rows() || V.rows() % n != 0)
        raise(ErrorKind::Shape, "block_aggregate: attn " + A.shape_str() + " vs values " + V.shape_str() +
                                    " with block " + std::to_string(n));
    const int d = V.cols();
    Tensor C(V.rows(), d);
    for (int r = 0; r < A.rows(); ++r) {
        const int base = (r / n) * n;
        for (int j = 0; j < n; ++j) {
            const double w = A.at(r, j);
            if (w == 0.0) continue;
            for (int c = 0; c < d; ++c) C.at(r, c) += w * V.at(base + j, c);
        }
    }
    int ai = attn.id, vi = values.id;
    int out = push(std::move(C), nullptr);
    nodes_[out].back = [ai, vi, n, d, out](Tape& t) {
        const Tensor& dC = t.grad(out);
        const Tensor& A2 = t.value(ai);
        const Tensor& V2 = t.value(vi);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dV = t.grad_mut(vi);
        for (int r = 0; r < A2.rows(); ++r) {
            const int base = (r / n) * n;
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int c = 0; c < d; ++c) s += dC.at(r, c) * V2.at(base + j, c);
                dA.at(r, j) += s;
                const double w = A2.at(r, j);
                if (w == 0.0) continue;
                for (int c = 0; c < d; ++c) dV.at(base + j, c) += w * dC.at(r, c);
            }
        }
    };
    return Var{this, out};
}

// ---------------------------------------------------------------------------

Var Tape::pearson(Var a, Var b) {
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    if (A.cols() != 1 || B.cols() != 1)
        raise(ErrorKind::Contract, "pearson: expected column vectors, got " + A.shape_str() + " and " + B.shape_str());
    if (A.rows() != B.rows())
        raise(ErrorKind::Contract, "pearson: length mismatch " + A.shape_str() + " vs " + B.shape_str());
    const int n = A.rows();
    if (n < 2) raise(ErrorKind::Contract, "pearson: need length >= 2, got " + std::to_string(n));

    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) { ma += A[i]; mb += B[i]; }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (int i = 0; i < n; ++i) {
        const double da = A[i] - ma, db = B[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    // Variance guard: degenerate inputs yield a constant with no gradient.
    if (saa / n < kVarianceGuard || sbb / n < kVarianceGuard)
        return Var{this, push(Tensor::from(1, 1, {0.0}), nullptr)};

    const double denom = std::sqrt(saa * sbb);
    const double rho = sab / denom;
    int ai = a.id, bi = b.id;
    int out = push(Tensor::from(1, 1, {rho}), nullptr);
    nodes_[out].back = [ai, bi, out, ma, mb, saa, sbb, denom, rho, n](Tape& t) {
        const double d = t.grad(out)[0];
        if (d == 0.0) return;
        const Tensor& A2 = t.value(ai);
        const Tensor& B2 = t.value(bi);
        Tensor& dA = t.grad_mut(ai);
        Tensor& dB = t.grad_mut(bi);
        for (int i = 0; i < n; ++i) {
            const double da = A2[i] - ma, db = B2[i] - mb;
            dA[i] += d * (db / denom - rho * da / saa);
            dB[i] += d * (da / denom - rho * db / sbb);
        }
    };
    return Var{this, out};
}

Var Tape::mse(Var pred, Var target) {
    const Tensor& P = value(pred.id);
    const Tensor& T = value(target.id);
    check_same_shape(P, T, "mse");
    Var diff = sub(pred, target);
    return mean(mul(diff, diff));
}

void Tape::backward(Var loss) {
    if (nodes_.empty()) raise(ErrorKind::Contract, "backward on empty tape");
    if (loss.tape != this || loss.id < 0 || loss.id >= static_cast<int>(nodes_.size()))
        raise(ErrorKind::Contract, "backward: loss is not a node of this tape");
    if (!value(loss.id).is_scalar())
        raise(ErrorKind::Contract, "backward: loss must be scalar, got " + value(loss.id).shape_str());
    grad_mut(loss.id)[0] = 1.0;
    for (int i = loss.id; i >= 0; --i) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
}

}  // namespace cbamgrid::ad
