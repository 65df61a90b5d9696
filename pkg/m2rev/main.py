# Entry point: python m2rev/main.py check src/
from app.cli.main import main

if __name__ == "__main__":
    main()
