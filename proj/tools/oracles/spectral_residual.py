"""Reference spectral-residual saliency (numpy + OpenCV resize/blur), used to
derive expectations for the C++ implementation on synthetic inputs."""
import sys

import cv2
import numpy as np
from skimage.filters import threshold_otsu


def saliency(gray, log_eps="log1p"):
    small = cv2.resize(gray.astype(np.float64), (64, 64), interpolation=cv2.INTER_LINEAR)
    f = np.fft.fft2(small)
    amp = np.abs(f)
    log_amp = np.log1p(amp) if log_eps == "log1p" else np.log(amp + 1e-12)
    residual = log_amp - cv2.blur(log_amp, (3, 3), borderType=cv2.BORDER_REFLECT_101)
    back = np.fft.ifft2(np.exp(residual) * np.exp(1j * np.angle(f)))
    energy = cv2.GaussianBlur(np.abs(back), (5, 5), 8, borderType=cv2.BORDER_REFLECT_101) ** 2
    energy /= energy.max()
    full = np.clip(cv2.resize(energy, gray.shape[::-1], interpolation=cv2.INTER_LINEAR), 0, 1)
    q = np.clip(np.round(full * 255), 0, 255).astype(np.uint8)
    t = threshold_otsu(q)
    return full, q > t


def square_case():
    img = np.zeros((256, 256))
    img[112:144, 112:144] = 255
    return img


if __name__ == "__main__":
    mode = sys.argv[1] if len(sys.argv) > 1 else "log1p"
    _, mask = saliency(square_case(), mode)
    ys, xs = np.nonzero(mask)
    print(f"{mode}: area={mask.sum()} ratio={mask.sum() / 1024:.3f} "
          f"bbox=({xs.min()},{ys.min()})-({xs.max()},{ys.max()}) "
          f"center_in={xs.min() <= 128 <= xs.max() and ys.min() <= 128 <= ys.max()}")
