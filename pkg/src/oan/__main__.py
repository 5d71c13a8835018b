from oan.cli import main
import sys
sys.exit(main())
