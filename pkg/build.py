"""
Build script for creating a standalone executable of the reduction toolkit
Run this script to create a single-file console executable
Use --debug flag to keep PyInstaller's debug output and bootloader logging
"""

import os
import sys
import subprocess


def build_exe(debug=False):
    """Build the executable using PyInstaller.

    Args:
        debug: If True, build with the bootloader's import logging enabled
    """
    env_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), '.env')
    separator = ';' if sys.platform == 'win32' else ':'

    cmd = [
        sys.executable, '-m', 'PyInstaller',
        '--name=ReductionToolkit_Debug' if debug else '--name=ReductionToolkit',
        '--console',
        '--onefile',    # Single executable file
        '--collect-submodules=galois',
        '--hidden-import=cli',
        '--hidden-import=config',
        '--hidden-import=errors',
        '--hidden-import=gf2codes',
        '--hidden-import=csp',
        '--hidden-import=mldchain',
        '--hidden-import=scc',
        '--hidden-import=mdpchain',
        '--hidden-import=latticecore',
        '--hidden-import=svpchain',
        '--hidden-import=instance_files',
        '--hidden-import=verification',
    ]
    if os.path.exists(env_file):
        cmd.append(f'--add-data=.env{separator}.')  # Embed .env file in the executable
    if debug:
        cmd.append('--debug=imports')
    cmd.append('main.py')

    print(f"Building executable ({'DEBUG MODE' if debug else 'RELEASE MODE'})...")
    print(f"Command: {' '.join(cmd)}")
    print()

    try:
        subprocess.run(cmd, check=True)
        print("\n" + "=" * 60)
        print("✓ Build successful!")
        print("=" * 60)
        exe_name = "ReductionToolkit_Debug" if debug else "ReductionToolkit"
        if sys.platform == 'win32':
            exe_name += ".exe"
        print(f"\nExecutable location: dist/{exe_name}")
        print("\nNote: a .env next to the executable overrides the embedded one.")
    except subprocess.CalledProcessError as e:
        print(f"\n✗ Build failed with error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    debug_mode = '--debug' in sys.argv
    build_exe(debug=debug_mode)
