# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel: sequential application of matrix exponentials.

Each step applies exp(-i * H_j * dt_j) to the state vector, with H_j a small
dense Hermitian matrix. Diagonalization is delegated to LAPACK zheev; the
surrounding loop, basis changes and phase factors run in C.
"""
from libc.stdlib cimport malloc, free
from libc.math cimport cos, sin

from scipy.linalg.cython_lapack cimport zheev


def apply_expm_sequence(double complex[:, :, ::1] hmats,
                        double[::1] dts,
                        double complex[::1] psi):
    """Apply exp(-i*hmats[j]*dts[j]) to psi for j = 0..n-1, in place."""
    cdef int n = hmats.shape[0]
    cdef int d = hmats.shape[1]
    cdef int j, r, c, k, info = 0, lwork = -1
    cdef double phase
    cdef double complex acc, ph
    cdef double complex wkopt
    cdef char jobz = b'V', uplo = b'U'

    if dts.shape[0] != n or psi.shape[0] != d or hmats.shape[2] != d:
        raise ValueError("inconsistent kernel input shapes")
    if n == 0:
        return

    cdef double complex *a = <double complex *> malloc(d * d * sizeof(double complex))
    cdef double *w = <double *> malloc(d * sizeof(double))
    cdef double *rwork = <double *> malloc((3 * d - 2) * sizeof(double))
    cdef double complex *tmp = <double complex *> malloc(d * sizeof(double complex))
    cdef double complex *work = NULL
    if a == NULL or w == NULL or rwork == NULL or tmp == NULL:
        free(a); free(w); free(rwork); free(tmp)
        raise MemoryError()

    try:
        # workspace query
        zheev(&jobz, &uplo, &d, a, &d, w, &wkopt, &lwork, rwork, &info)
        lwork = <int> wkopt.real
        work = <double complex *> malloc(lwork * sizeof(double complex))
        if work == NULL:
            raise MemoryError()

        for j in range(n):
            # column-major copy of the row-major input
            for c in range(d):
                for r in range(d):
                    a[c * d + r] = hmats[j, r, c]
            zheev(&jobz, &uplo, &d, a, &d, w, work, &lwork, rwork, &info)
            if info != 0:
                raise RuntimeError(f"zheev failed at step {j} (info={info})")
            # tmp = exp(-i*w*dt) * V^H psi
            for k in range(d):
                acc = 0
                for r in range(d):
                    acc = acc + a[k * d + r].conjugate() * psi[r]
                phase = w[k] * dts[j]
                ph = cos(phase) - 1j * sin(phase)
                tmp[k] = acc * ph
            # psi = V tmp
            for r in range(d):
                acc = 0
                for k in range(d):
                    acc = acc + a[k * d + r] * tmp[k]
                psi[r] = acc
    finally:
        free(a)
        free(w)
        free(rwork)
        free(tmp)
        free(work)
