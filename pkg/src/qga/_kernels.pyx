# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""In-place statevector gate kernels (compiled backend).

Qubit 0 is the most significant bit of an amplitude index.  For a gate on
``qubits = (q0, q1, ...)`` the local matrix index treats ``q0`` as its most
significant bit.  Gates act on at most three qubits.

Complex arithmetic is spelled out on (re, im) double pairs; C99 complex
multiplication carries NaN/inf recovery that dominates the loop otherwise.
"""

ctypedef long long i64


cdef inline int _prepare(int num_qubits, const i64[::1] qubits,
                         i64* offs, int* pos_sorted) except -1:
    cdef int k = qubits.shape[0]
    cdef int dim, j, t, p
    cdef i64 o
    if k < 1 or k > 3:
        raise ValueError("gates act on 1 to 3 qubits")
    for t in range(k):
        if qubits[t] < 0 or qubits[t] >= num_qubits:
            raise ValueError("qubit index out of range")
        for j in range(t):
            if qubits[j] == qubits[t]:
                raise ValueError("repeated qubit")
    dim = 1 << k
    for j in range(dim):
        o = 0
        for t in range(k):
            if (j >> (k - 1 - t)) & 1:
                o |= (<i64>1) << (num_qubits - 1 - qubits[t])
        offs[j] = o
    for t in range(k):
        pos_sorted[t] = num_qubits - 1 - <int>qubits[t]
    for t in range(1, k):
        p = pos_sorted[t]
        j = t - 1
        while j >= 0 and pos_sorted[j] > p:
            pos_sorted[j + 1] = pos_sorted[j]
            j -= 1
        pos_sorted[j + 1] = p
    return k


cdef inline i64 _base_index(i64 i, int k, const int* pos_sorted) noexcept nogil:
    cdef int t, p
    for t in range(k):
        p = pos_sorted[t]
        i = ((i >> p) << (p + 1)) | (i & (((<i64>1) << p) - 1))
    return i


cdef void _dense_1q(double* s, i64 n_amps, int pos, const double* mr, const double* mi) noexcept nogil:
    cdef i64 stride = (<i64>1) << pos
    cdef i64 block, j, a, b
    cdef double ar, ai, br_, bi_
    block = 0
    while block < n_amps:
        for j in range(block, block + stride):
            a = 2 * j
            b = 2 * (j + stride)
            ar = s[a]
            ai = s[a + 1]
            br_ = s[b]
            bi_ = s[b + 1]
            s[a] = mr[0] * ar - mi[0] * ai + mr[1] * br_ - mi[1] * bi_
            s[a + 1] = mr[0] * ai + mi[0] * ar + mr[1] * bi_ + mi[1] * br_
            s[b] = mr[2] * ar - mi[2] * ai + mr[3] * br_ - mi[3] * bi_
            s[b + 1] = mr[2] * ai + mi[2] * ar + mr[3] * bi_ + mi[3] * br_
        block += 2 * stride


def apply_dense(double complex[::1] state, int num_qubits, const i64[::1] qubits,
                const double complex[:, ::1] matrix):
    """Multiply the amplitudes in place by ``matrix`` acting on ``qubits``."""
    cdef i64 offs[8]
    cdef int pos_sorted[3]
    cdef double mr[64]
    cdef double mi[64]
    cdef double br[8]
    cdef double bi[8]
    cdef double ar, ai
    cdef int k = _prepare(num_qubits, qubits, offs, pos_sorted)
    cdef int dim = 1 << k
    cdef i64 nbase = (<i64>1) << (num_qubits - k)
    cdef i64 i, base, idx
    cdef int r, c
    cdef double* s
    if matrix.shape[0] != dim or matrix.shape[1] != dim:
        raise ValueError("matrix shape does not match gate arity")
    if state.shape[0] != ((<i64>1) << num_qubits):
        raise ValueError("state length does not match num_qubits")
    for r in range(dim):
        for c in range(dim):
            mr[r * dim + c] = matrix[r, c].real
            mi[r * dim + c] = matrix[r, c].imag
    s = <double*>&state[0]
    if k == 1:
        with nogil:
            _dense_1q(s, (<i64>1) << num_qubits, pos_sorted[0], mr, mi)
        return
    with nogil:
        for i in range(nbase):
            base = _base_index(i, k, pos_sorted)
            for c in range(dim):
                idx = 2 * (base + offs[c])
                br[c] = s[idx]
                bi[c] = s[idx + 1]
            for r in range(dim):
                ar = 0.0
                ai = 0.0
                for c in range(dim):
                    ar = ar + mr[r * dim + c] * br[c] - mi[r * dim + c] * bi[c]
                    ai = ai + mr[r * dim + c] * bi[c] + mi[r * dim + c] * br[c]
                idx = 2 * (base + offs[r])
                s[idx] = ar
                s[idx + 1] = ai


def apply_monomial(double complex[::1] state, int num_qubits, const i64[::1] qubits,
                   const i64[::1] perm, const double complex[::1] phase):
    """Apply ``U|j> = phase[j] |perm[j]>`` in place on ``qubits``."""
    cdef i64 offs[8]
    cdef i64 dst[8]
    cdef int pos_sorted[3]
    cdef double pr[8]
    cdef double pi_[8]
    cdef double br[8]
    cdef double bi[8]
    cdef int k = _prepare(num_qubits, qubits, offs, pos_sorted)
    cdef int dim = 1 << k
    cdef i64 nbase = (<i64>1) << (num_qubits - k)
    cdef i64 i, base, idx
    cdef int j, nmove = 0
    cdef int moved[8]
    cdef bint unit = True
    cdef double* s
    if perm.shape[0] != dim or phase.shape[0] != dim:
        raise ValueError("perm/phase length does not match gate arity")
    if state.shape[0] != ((<i64>1) << num_qubits):
        raise ValueError("state length does not match num_qubits")
    for j in range(dim):
        if perm[j] < 0 or perm[j] >= dim:
            raise ValueError("perm entry out of range")
        dst[j] = offs[perm[j]]
        pr[j] = phase[j].real
        pi_[j] = phase[j].imag
        if pr[j] != 1.0 or pi_[j] != 0.0:
            unit = False
        if perm[j] != j or not (pr[j] == 1.0 and pi_[j] == 0.0):
            moved[nmove] = j
            nmove += 1
    if nmove == 0:
        return
    s = <double*>&state[0]
    with nogil:
        if unit:
            # pure permutation: only the displaced local amplitudes are touched
            for i in range(nbase):
                base = _base_index(i, k, pos_sorted)
                for j in range(nmove):
                    idx = 2 * (base + offs[moved[j]])
                    br[j] = s[idx]
                    bi[j] = s[idx + 1]
                for j in range(nmove):
                    idx = 2 * (base + dst[moved[j]])
                    s[idx] = br[j]
                    s[idx + 1] = bi[j]
        else:
            for i in range(nbase):
                base = _base_index(i, k, pos_sorted)
                for j in range(nmove):
                    idx = 2 * (base + offs[moved[j]])
                    br[j] = s[idx]
                    bi[j] = s[idx + 1]
                for j in range(nmove):
                    idx = 2 * (base + dst[moved[j]])
                    s[idx] = pr[moved[j]] * br[j] - pi_[moved[j]] * bi[j]
                    s[idx + 1] = pr[moved[j]] * bi[j] + pi_[moved[j]] * br[j]
