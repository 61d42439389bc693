"""``project``, ``backproject`` and ``matrix`` subcommands."""
import argparse
from typing import TextIO

from xrt.cli.common import add_config_arguments, add_threads_argument, load_rays
from xrt.core.exceptions import EXIT_OK
from xrt.io.binary import read_image, read_sinogram, write_image, write_matrix, write_sinogram
from xrt.services.projector import assemble_matrix, back_project, forward_project


def run_project(args: argparse.Namespace, stdout: TextIO) -> int:
    grid, rays = load_rays(args)
    image = read_image(args.image, grid)
    sino = forward_project(image, rays, threads=args.threads)
    write_sinogram(args.out, sino)
    print(f"wrote sinogram of {sino.ray_count} values to {args.out}", file=stdout)
    return EXIT_OK


def run_backproject(args: argparse.Namespace, stdout: TextIO) -> int:
    grid, rays = load_rays(args)
    sino = read_sinogram(args.sino, ray_count=len(rays))
    image = back_project(sino, rays, grid, threads=args.threads)
    write_image(args.out, image)
    print(f"wrote image {'x'.join(map(str, grid.shape))} to {args.out}", file=stdout)
    return EXIT_OK


def run_matrix(args: argparse.Namespace, stdout: TextIO) -> int:
    grid, rays = load_rays(args)
    matrix = assemble_matrix(rays, grid, threads=args.threads)
    written = write_matrix(args.out, matrix)
    print(f"wrote {matrix.n_rows}x{matrix.n_cols} matrix, {matrix.nnz} nonzeros, {written} bytes to {args.out}", file=stdout)
    return EXIT_OK


def register(subparsers) -> None:
    project = subparsers.add_parser("project", help="Forward-project an image into a sinogram")
    add_config_arguments(project)
    project.add_argument("--image", required=True, help="Dense image file")
    project.add_argument("--out", required=True, help="Output sinogram file")
    add_threads_argument(project)
    project.set_defaults(func=run_project)

    backproject = subparsers.add_parser("backproject", help="Apply the adjoint to a sinogram")
    add_config_arguments(backproject)
    backproject.add_argument("--sino", required=True, help="Dense sinogram file")
    backproject.add_argument("--out", required=True, help="Output image file")
    add_threads_argument(backproject)
    backproject.set_defaults(func=run_backproject)

    matrix = subparsers.add_parser("matrix", help="Assemble and store the sparse projection matrix")
    add_config_arguments(matrix)
    matrix.add_argument("--out", required=True, help="Output matrix file")
    add_threads_argument(matrix)
    matrix.set_defaults(func=run_matrix)
